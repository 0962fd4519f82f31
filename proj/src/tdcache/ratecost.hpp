#pragma once

#include <memory>
#include <span>
#include <vector>

#include "tdcache/policy.hpp"
#include "tdcache/rdi.hpp"

namespace tdcache {

// Static policy quantities for a fixed maximum caching time t (t may be +inf).
double hit_ratio(const Rdi& rdi, double t);
double mean_caching_time(const Rdi& rdi, double t);

// Same quantities averaged over a randomized policy.
double hit_ratio(const Rdi& rdi, const CachePolicy& policy);
double mean_caching_time(const Rdi& rdi, const CachePolicy& policy);

// Normalized storage cost s(r) of the static policy that reaches hit ratio r.
double rate_cost(const Rdi& rdi, double r);
// Closed-form s(r) for an untransformed base family.
double rate_cost_closed_form(Family family, std::span<const double> params, double r);
// ds/dr of the static curve from the right.
double static_marginal_cost(const Rdi& rdi, double r);
// d²s/dr² of the static curve; throws DomainError where the density vanishes.
double curvature(const Rdi& rdi, double r);

struct CurvePoint {
  double r;
  double s;
};

// Lower convex hull of points sorted by r; near-collinear vertices are merged.
std::vector<CurvePoint> lower_convex_hull(std::span<const CurvePoint> points,
                                          double collinear_tol = 1e-10);

enum class CurveClass { linear_alpha, self_convex, general };
const char* curve_class_name(CurveClass c);

// A piece of the envelope: either a chord between two curve points or a stretch
// where the envelope coincides with the static curve.
struct EnvelopePiece {
  bool on_curve;
  double r0, s0, r1, s1;

  double slope() const { return (s1 - s0) / (r1 - r0); }
};

struct CurveOptions {
  std::size_t grid = 2048;
  // Last sampled hit ratio is r_sup - truncation when the cost diverges at r_sup.
  double truncation = 1e-4;
  double refine_tol = 1e-9;
  int max_refinements = 40;
};

class RateCostCurve {
 public:
  static RateCostCurve build(std::shared_ptr<const Rdi> rdi, const CurveOptions& options = {});

  const Rdi& rdi() const { return *rdi_; }
  std::shared_ptr<const Rdi> rdi_ptr() const { return rdi_; }
  std::span<const CurvePoint> samples() const { return samples_; }
  std::span<const CurvePoint> envelope_vertices() const { return vertices_; }
  std::span<const EnvelopePiece> pieces() const { return pieces_; }
  CurveClass classification() const { return class_; }
  double r_sup() const { return r_sup_; }
  double s_sup() const { return s_sup_; }
  // True when s(r) diverges at r_sup; the grid then stops at r_max() < r_sup.
  bool asymptotic() const { return asymptotic_; }
  double r_max() const { return r_max_; }
  // Cost per unit hit ratio of the single chord; meaningful for linear_alpha.
  double alpha() const;

  double static_cost(double r) const;
  double envelope(double r) const;
  // Right derivative of the envelope at r.
  double envelope_slope(double r) const;
  double initial_slope() const;
  double final_slope() const;

  // Largest hit ratio whose envelope marginal cost does not exceed beta.
  double max_fill_at_price(double beta) const;
  // Cheapest randomized policy reaching hit ratio r.
  CachePolicy policy_for_target(double r) const;

 private:
  CachePolicy static_policy(double r) const;
  const EnvelopePiece* piece_at(double r) const;

  std::shared_ptr<const Rdi> rdi_;
  std::vector<CurvePoint> samples_;
  std::vector<CurvePoint> vertices_;
  std::vector<EnvelopePiece> pieces_;
  CurveClass class_ = CurveClass::general;
  double r_sup_ = 0.0;
  double s_sup_ = 0.0;
  double r_max_ = 0.0;
  bool asymptotic_ = false;
};

}  // namespace tdcache
