#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tdcache/policy.hpp"
#include "tdcache/ratecost.hpp"
#include "tdcache/rdi.hpp"

namespace tdcache {

struct FlowClass {
  std::string label;
  double weight;
  RdiSpec rdi;
};

struct FlowSpec {
  std::vector<FlowClass> classes;
  double arrival_rate = 10.0;     // items per second
  double bits_per_item = 1000.0;  // B
  double c2 = 1.0;                // asymptotic variability of arrivals

  void validate() const;
};

// A flow with every class curve and envelope built once.
class Flow {
 public:
  explicit Flow(FlowSpec spec, const CurveOptions& options = {});

  const FlowSpec& spec() const { return spec_; }
  std::size_t size() const { return curves_.size(); }
  double weight(std::size_t i) const { return spec_.classes[i].weight; }
  const Rdi& rdi(std::size_t i) const { return curves_[i]->rdi(); }
  const RateCostCurve& curve(std::size_t i) const { return *curves_[i]; }
  std::span<const std::shared_ptr<const RateCostCurve>> curves() const { return curves_; }

  // Sum of weight * (1 - q_i): largest reachable hit ratio.
  double feasible_sup() const { return r_sup_; }
  // Sum of weight * s_sup_i, may be +inf.
  double s_sup() const { return s_sup_; }
  double undemand_prob() const { return 1.0 - r_sup_; }

 private:
  FlowSpec spec_;
  std::vector<std::shared_ptr<const RateCostCurve>> curves_;
  double r_sup_ = 0.0;
  double s_sup_ = 0.0;
};

struct ClassAllocation {
  double hit_ratio;
  double cost;
  CachePolicy policy;
};

struct Allocation {
  double beta;
  std::vector<ClassAllocation> classes;
  double hit_ratio;
  double cost;
};

// Per-class fills r_i(beta) for a set of locally known curves.
std::vector<double> fills_at_price(std::span<const std::shared_ptr<const RateCostCurve>> curves,
                                   double beta);

Allocation allocate(const Flow& flow, double r_target);
// Greedy fill by ascending cost per hit; every class must be linear_alpha.
Allocation allocate_lp(const Flow& flow, double r_target);

struct EndpointDerivatives {
  double at_zero;  // d r_breve / ds at s = 0
  double at_sup;   // d r_breve / ds at s = s_sup
};
EndpointDerivatives endpoint_derivatives(const Flow& flow);

// Best overall hit ratio r_breve(s) for a mean caching time s, and its inverse.
class OverallCurve {
 public:
  static OverallCurve build(const Flow& flow);

  double r_breve(double s) const;
  double s_star(double r) const;
  // Three-point difference, clamped to be nonincreasing in s.
  double derivative(double s) const;
  double left_derivative(double s) const;
  double right_derivative(double s) const;

  double s_sup() const { return s_sup_; }
  double r_sup() const { return r_sup_; }
  bool asymptotic() const { return asymptotic_; }
  // Largest tabulated cost; equals s_sup unless the cost diverges.
  double s_max() const { return table_.back().s; }
  std::span<const CurvePoint> table() const { return table_; }

 private:
  std::vector<CurvePoint> table_;  // sorted by s (and r)
  double s_sup_ = 0.0;
  double r_sup_ = 0.0;
  bool asymptotic_ = false;
  double step_ = 1e-6;
};

// Distribution of the realized caching time W across all classes of a flow.
class CachingTimeLaw {
 public:
  CachingTimeLaw(const Flow& flow, std::span<const CachePolicy> policies);

  // P(W > x) for x >= 0.
  double survival(double x) const;
  double cdf(double x) const;
  double mean() const;
  double survival_sq_integral() const;

 private:
  double integrate_piecewise(bool squared) const;

  struct Part {
    double weight;  // class weight times policy-atom weight
    double max_time;
    std::shared_ptr<const Rdi> rdi;
  };
  std::vector<Part> parts_;
  std::vector<double> breaks_;
};

struct PolicyStats {
  double hit_ratio;
  double mean_caching_time;
};
PolicyStats policy_stats(const Flow& flow, std::span<const CachePolicy> policies);

// Peakedness of the arrival stream against the caching-time law; checks that s
// matches the law's mean to 1e-6 relative.
double peakedness(const CachingTimeLaw& law, double s, double c2);

}  // namespace tdcache
