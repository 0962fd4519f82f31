#pragma once

#include <string>

#include "tdcache/allocator.hpp"

namespace tdcache {

enum class Regime { demand_limited, buffer_limited, interior, sup_saturated };
const char* regime_name(Regime r);

// Hit ratio of a finite buffer of L slots when the flow spends mean caching time s:
// r(L, s) = r_breve(s) * (1 - B(uL, u*lambda*s)).
class FiniteBufferModel {
 public:
  FiniteBufferModel(const OverallCurve& curve, double L, double arrival_rate, double c2);

  double hit_ratio(double s) const;
  double blocking(double s) const;
  // Stationarity expression whose sign change brackets interior optima. The
  // one-sided variants use one-sided slopes of r_breve.
  double residual(double s) const;
  double residual_left(double s) const;
  double residual_right(double s) const;

  const OverallCurve& curve() const { return curve_; }
  double servers() const { return L_; }
  double arrival_rate() const { return lambda_; }
  double scale() const { return u_; }

 private:
  double residual_with(double s, double slope) const;

  const OverallCurve& curve_;
  double L_;
  double lambda_;
  double u_;
};

double finite_hit_ratio(const OverallCurve& curve, double L, double s, double arrival_rate,
                        double c2);
double stationarity_residual(const OverallCurve& curve, double L, double arrival_rate, double c2,
                             double s);

struct FiniteOptResult {
  double s_star = 0.0;
  double r_star = 0.0;
  double R_star = 0.0;  // bits per second
  Regime regime = Regime::interior;
  double residual = 0.0;
  double residual_left = 0.0;
  double residual_right = 0.0;
  int iterations = 0;
  bool quasi_concavity_verified = true;
  std::string diagnostic;
};

FiniteOptResult optimize(const Flow& flow, const OverallCurve& curve, double L,
                         double arrival_rate, double c2);

struct RegimeThresholds {
  double lambda_threshold;
  double L_threshold;
  // True when s_sup is infinite and the thresholds are not meaningful.
  bool truncated;
};
RegimeThresholds regime_thresholds(const Flow& flow, const OverallCurve& curve,
                                   double arrival_rate, double c2);

struct AsymptoticPerformance {
  double large_hit_ratio;
  double large_throughput;
  double small_caching_time;
  double small_hit_ratio;
  double small_throughput;
};
AsymptoticPerformance asymptotic_performance(const Flow& flow, double L, double arrival_rate);

}  // namespace tdcache
