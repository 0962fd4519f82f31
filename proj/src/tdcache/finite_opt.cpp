#include "tdcache/finite_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdcache/blocking.hpp"
#include "tdcache/errors.hpp"

namespace tdcache {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::demand_limited: return "demand_limited";
    case Regime::buffer_limited: return "buffer_limited";
    case Regime::interior: return "interior";
    case Regime::sup_saturated: return "sup_saturated";
  }
  return "?";
}

FiniteBufferModel::FiniteBufferModel(const OverallCurve& curve, double L, double arrival_rate,
                                     double c2)
    : curve_(curve), L_(L), lambda_(arrival_rate), u_(variability_scale(c2)) {
  if (!(L >= 0.0) || !std::isfinite(L)) throw DomainError("buffer size must be finite and >= 0");
  if (!(arrival_rate > 0.0)) throw DomainError("arrival rate must be positive");
}

double FiniteBufferModel::blocking(double s) const {
  if (s < 0.0) throw DomainError("mean caching time must be >= 0");
  return erlang_b(u_ * L_, u_ * lambda_ * s);
}

double FiniteBufferModel::hit_ratio(double s) const {
  if (s < 0.0) throw DomainError("mean caching time must be >= 0");
  if (std::isfinite(curve_.s_sup()) && s > curve_.s_sup() * (1.0 + 1e-12))
    throw DomainError("mean caching time exceeds s_sup");
  if (s == 0.0) return 0.0;
  return curve_.r_breve(s) * (1.0 - blocking(s));
}

double FiniteBufferModel::residual_with(double s, double slope) const {
  const double b = blocking(s);
  if (b >= 1.0) return -kInf;
  return slope - u_ * (L_ / (s * (1.0 - b)) - lambda_) * b * curve_.r_breve(s);
}

double FiniteBufferModel::residual(double s) const { return residual_with(s, curve_.derivative(s)); }

double FiniteBufferModel::residual_left(double s) const {
  return residual_with(s, curve_.left_derivative(s));
}

double FiniteBufferModel::residual_right(double s) const {
  return residual_with(s, curve_.right_derivative(s));
}

double finite_hit_ratio(const OverallCurve& curve, double L, double s, double arrival_rate,
                        double c2) {
  return FiniteBufferModel(curve, L, arrival_rate, c2).hit_ratio(s);
}

double stationarity_residual(const OverallCurve& curve, double L, double arrival_rate, double c2,
                             double s) {
  if (!(s > 0.0)) throw DomainError("stationarity residual needs s > 0");
  return FiniteBufferModel(curve, L, arrival_rate, c2).residual(s);
}

namespace {

struct Search {
  double s;
  double value;
  int iterations;
};

Search golden_max(const FiniteBufferModel& m, double a, double b, double width_tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = m.hit_ratio(c), fd = m.hit_ratio(d);
  int it = 0;
  for (; it < 200 && b - a > width_tol; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = m.hit_ratio(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = m.hit_ratio(c);
    }
  }
  const double s = 0.5 * (a + b);
  return {s, m.hit_ratio(s), it};
}

}  // namespace

FiniteOptResult optimize(const Flow& flow, const OverallCurve& curve, double L,
                         double arrival_rate, double c2) {
  if (!(L >= 1.0)) throw DomainError("optimize needs L >= 1");
  const FiniteBufferModel m(curve, L, arrival_rate, c2);
  FiniteOptResult res;

  double s_hi = curve.s_sup();
  if (!std::isfinite(s_hi)) {
    // Expand geometrically until the objective falls on two consecutive doublings.
    const double cap = curve.s_max();
    double s = std::min(cap, std::max(1.0, 2.0 * L / arrival_rate));
    double prev = m.hit_ratio(s);
    int drops = 0;
    bool stopped = false;
    while (2.0 * s <= cap) {
      s *= 2.0;
      const double next = m.hit_ratio(s);
      drops = next < prev ? drops + 1 : 0;
      prev = next;
      if (drops == 2) {
        stopped = true;
        break;
      }
    }
    s_hi = s;
    if (!stopped) {
      s_hi = cap;
      res.diagnostic = "search domain reached the largest tabulated cost";
    }
  }

  Search best{0.0, 0.0, 0};
  if (L > 1000.0) {
    res.quasi_concavity_verified = false;
    res.diagnostic = "quasi-concavity unverified beyond L = 1000; grid scan used";
    const int n = 4096;
    int arg = 1;
    double top = -1.0;
    for (int k = 1; k <= n; ++k) {
      const double v = m.hit_ratio(s_hi * k / n);
      if (v > top) {
        top = v;
        arg = k;
      }
    }
    best = golden_max(m, s_hi * (arg - 1) / n, s_hi * std::min(arg + 1, n) / n, 1e-8 * s_hi);
    best.iterations += n;
  } else {
    best = golden_max(m, 0.0, s_hi, 1e-8 * s_hi);
  }
  const double at_top = m.hit_ratio(s_hi);
  if (at_top >= best.value) best = {s_hi, at_top, best.iterations};

  // On a flat top, report the smallest cost that attains it.
  const double probe = best.s * (1.0 - 1e-3);
  const double flat_tol = 1e-10 * std::max(best.value, 1e-300);
  if (best.s > 0.0 && m.hit_ratio(probe) >= best.value - flat_tol) {
    double lo = 0.0, hi = best.s;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * best.s; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (m.hit_ratio(mid) >= best.value - flat_tol)
        hi = mid;
      else
        lo = mid;
    }
    best.s = hi;
    best.value = m.hit_ratio(hi);
  }

  res.s_star = best.s;
  res.r_star = best.value;
  res.R_star = arrival_rate * flow.spec().bits_per_item * res.r_star;
  res.iterations = best.iterations;
  if (res.s_star > 0.0 && res.s_star < curve.s_max()) {
    res.residual = m.residual(res.s_star);
    res.residual_left = m.residual_left(res.s_star);
    res.residual_right = m.residual_right(res.s_star);
  }
  const bool at_sup = std::isfinite(curve.s_sup()) && res.s_star >= s_hi * (1.0 - 1e-9);
  const double small = L / arrival_rate;
  if (at_sup)
    res.regime = res.r_star >= 0.99 * flow.feasible_sup() ? Regime::demand_limited
                                                          : Regime::sup_saturated;
  else if (std::abs(res.s_star - small) <= 0.15 * small)
    res.regime = Regime::buffer_limited;
  else
    res.regime = Regime::interior;
  return res;
}

RegimeThresholds regime_thresholds(const Flow& flow, const OverallCurve& curve,
                                   double arrival_rate, double c2) {
  const double u = variability_scale(c2);
  const double d_sup = endpoint_derivatives(flow).at_sup;
  const double s_sup = curve.s_sup();
  RegimeThresholds t{d_sup, kInf, !std::isfinite(s_sup) || d_sup <= 0.0};
  if (t.truncated) return t;
  const double e2 = std::exp(2.0);
  const double first = arrival_rate * arrival_rate * s_sup / d_sup + 1.0 / u;
  const double log_form =
      std::log(arrival_rate * e2 / (u * s_sup)) / (2.0 * u) - std::log(d_sup) / u;
  t.L_threshold = std::min(first, std::max(log_form, arrival_rate * s_sup * e2));
  return t;
}

AsymptoticPerformance asymptotic_performance(const Flow& flow, double L, double arrival_rate) {
  const double demand = flow.feasible_sup();
  const double bits = flow.spec().bits_per_item;
  const double d0 = endpoint_derivatives(flow).at_zero;
  AsymptoticPerformance a{};
  a.large_hit_ratio = demand;
  a.large_throughput = arrival_rate * bits * demand;
  a.small_caching_time = L / arrival_rate;
  a.small_hit_ratio = L / arrival_rate * d0;
  a.small_throughput = L * bits * d0;
  return a;
}

}  // namespace tdcache
