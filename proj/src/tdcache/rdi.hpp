#pragma once

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tdcache/numeric.hpp"

namespace tdcache {

enum class Family { exponential, uniform, triangular, pareto, arcsine };

// Parameter layouts:
//   exponential {rate}
//   uniform     {lo, hi}
//   triangular  {lo, hi, mode}
//   pareto      {shape, scale}
//   arcsine     {width}          support (0, width)
struct FamilySpec {
  Family family;
  std::vector<double> params;
};

struct PointMassSpec {
  double location;
};

struct RdiSpec;

struct MixtureSpec {
  std::vector<double> weights;
  std::vector<RdiSpec> components;
};

enum class TransformOp { time_scale, time_shift, density_scale, rate_shift };

struct Transform {
  TransformOp op;
  double xi;
  double zeta = 0.0;  // atom location, rate_shift only
};

struct RdiSpec {
  std::variant<FamilySpec, PointMassSpec, MixtureSpec> base;
  // Applied in order: transforms[0] acts on the base first.
  std::vector<Transform> transforms;

  RdiSpec then(Transform t) const;
};

RdiSpec exponential(double rate);
RdiSpec uniform(double lo, double hi);
RdiSpec triangular(double lo, double hi, double mode);
RdiSpec pareto(double shape, double scale);
RdiSpec arcsine(double width);
RdiSpec point_mass(double location);
RdiSpec mixture(std::vector<double> weights, std::vector<RdiSpec> components);

Transform time_scale(double xi);
Transform time_shift(double xi);
Transform density_scale(double xi);
Transform rate_shift(double xi, double zeta);

const char* family_name(Family f);
const char* transform_name(TransformOp op);

// One of the five families with validated parameters, normalized to unit mass.
class BaseDistribution {
 public:
  BaseDistribution(Family family, std::span<const double> params);

  Family family() const { return family_; }
  std::span<const double> params() const { return {params_.data(), count_}; }

  double pdf(double y) const;
  double pdf_derivative(double y) const;
  double cdf(double y) const;
  // Integral of u f(u) over (-inf, y].
  double partial_mean(double y) const;
  double quantile(double z) const;
  double mean() const;
  double lower() const;
  double upper() const;

 private:
  Family family_;
  std::array<double, 3> params_{};
  std::size_t count_ = 0;
};

struct Moments {
  double q;      // probability of never being requested
  double nu;     // integral of x p(x) over [0, inf), may be +inf
  double t_inf;  // left end of the support
  double t_sup;  // right end of the support, may be +inf
};

struct Atom {
  double location;
  double weight;
};

// Canonical form of an RdiSpec: weighted affine images of base families plus atoms.
class Rdi {
 public:
  struct Component {
    double weight;
    BaseDistribution base;
    double scale;  // X = scale * Y + shift
    double shift;
  };

  explicit Rdi(RdiSpec spec);

  const RdiSpec& spec() const { return spec_; }
  std::span<const Component> components() const { return components_; }
  std::span<const Atom> atoms() const { return atoms_; }

  // Density of the continuous part; atoms are reported by atoms().
  double pdf(double x) const;
  double pdf_derivative(double x) const;
  // P(X <= x) with the never-requested mass counted below zero; x < 0 gives q.
  double cdf(double x) const;
  // P(X < x).
  double cdf_left(double x) const;
  double quantile(double z) const;
  // Integral of x dP over [0, t], atoms included; t may be +inf.
  double partial_expectation(double t) const;
  const Moments& moments() const { return moments_; }
  double undemand_prob() const { return moments_.q; }

  // Request delay of one item; empty means the item is never requested.
  std::optional<double> sample(Rng& rng) const;

 private:
  double quantile_bisect(double z) const;

  RdiSpec spec_;
  std::vector<Component> components_;
  std::vector<Atom> atoms_;
  Moments moments_{};
};

}  // namespace tdcache
