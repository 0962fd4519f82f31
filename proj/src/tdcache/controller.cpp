#include "tdcache/controller.hpp"

#include <algorithm>
#include <cmath>

#include "tdcache/errors.hpp"

namespace tdcache {

SimulatedEnvironment::SimulatedEnvironment(std::vector<SimClass> classes, ArrivalProcess arrivals,
                                           std::optional<std::size_t> buffer, std::uint64_t seed,
                                           double bits_per_item, double settle_fraction)
    : sim_(classes, arrivals, buffer, seed, bits_per_item),
      classes_(classes.size()),
      bits_(bits_per_item),
      settle_(settle_fraction) {}

EpochMeasurement SimulatedEnvironment::run_epoch(std::span<const CachePolicy> policies,
                                                 std::size_t window) {
  sim_.set_policies(policies);
  sim_.skip(static_cast<std::size_t>(settle_ * static_cast<double>(window)));
  const SimReport rep = sim_.measure(window, 20);
  EpochMeasurement m;
  m.storage = rep.occupancy.mean * bits_;
  m.storage_stderr = rep.occupancy.stderr_ * bits_;
  m.throughput = rep.throughput.mean;
  m.throughput_stderr = rep.throughput.stderr_;
  m.arrivals = rep.measured_arrivals;
  return m;
}

namespace {

// Largest r in [lo, hi] whose static marginal cost is at most beta.
double fill_curve(const Rdi& rdi, double lo, double hi, double beta) {
  if (static_marginal_cost(rdi, lo) > beta) return lo;
  if (static_marginal_cost(rdi, hi) <= beta) return hi;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (static_marginal_cost(rdi, mid) <= beta)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

double fill_at_price(const RateCostCurve& curve, double beta, double band) {
  if (!(beta >= 0.0)) throw DomainError("shadow price must be >= 0");
  if (curve.r_sup() <= 0.0) return 0.0;
  double r = 0.0;
  for (const auto& p : curve.pieces()) {
    if (p.on_curve) {
      r += fill_curve(curve.rdi(), p.r0, p.r1, beta) - p.r0;
    } else {
      const double k = p.slope();
      const double lo = k * (1.0 - 0.5 * band), hi = k * (1.0 + 0.5 * band);
      double frac = beta >= hi ? 1.0 : beta <= lo ? 0.0 : (beta - lo) / (hi - lo);
      if (band <= 0.0) frac = beta >= k ? 1.0 : 0.0;
      r += frac * (p.r1 - p.r0);
    }
  }
  if (curve.asymptotic())
    r += fill_curve(curve.rdi(), curve.r_max(), std::nextafter(curve.r_sup(), 0.0), beta) -
         curve.r_max();
  return std::clamp(r, 0.0, curve.r_sup());
}

std::vector<CachePolicy> beta_to_policy(LocalCurves curves, double beta, double band) {
  if (!(beta > 0.0)) throw DomainError("shadow price must be positive");
  std::vector<CachePolicy> out;
  for (const auto& c : curves) out.push_back(c->policy_for_target(fill_at_price(*c, beta, band)));
  return out;
}

ControllerState run_infinite(double target_storage, LocalCurves curves,
                             ControllerEnvironment& env, const ControllerOptions& opt) {
  if (!(target_storage >= 0.0)) throw DomainError("target storage must be >= 0");
  if (opt.window < 1000) throw InvalidSpec("measurement window must be >= 1e3 arrivals");
  if (!(opt.beta0 > 0.0)) throw InvalidSpec("initial shadow price must be positive");
  ControllerState st;
  st.beta = opt.beta0;
  std::size_t streak = 0;
  for (std::size_t e = 0; e < opt.max_epochs; ++e) {
    const auto policies = beta_to_policy(curves, st.beta, opt.price_band);
    const EpochMeasurement m = env.run_epoch(policies, opt.window);
    st.history.push_back({e, st.beta, m.storage, m.storage_stderr, opt.window});
    st.measured = m.storage;
    st.measured_stderr = m.storage_stderr;
    st.epochs = e + 1;

    const bool close = target_storage > 0.0
                           ? std::abs(m.storage / target_storage - 1.0) <= opt.tolerance
                           : m.storage == 0.0;
    streak = close ? streak + 1 : 0;
    if (streak >= opt.consecutive) {
      st.converged = true;
      return st;
    }
    if (target_storage <= 0.0) {
      st.beta *= 0.5;
      continue;
    }
    const double next = st.beta + (1.0 - m.storage / target_storage) * opt.step_fraction * st.beta;
    st.beta = next > 0.0 ? next : 0.5 * st.beta;
  }
  st.diagnostic = "epoch budget exhausted before the storage estimate settled";
  return st;
}

namespace {

struct Probe {
  double beta;
  double value;
  double stderr_;
};

class FiniteSearch {
 public:
  FiniteSearch(LocalCurves curves, ControllerEnvironment& env, const ControllerOptions& opt,
               ControllerState& st)
      : curves_(curves), env_(env), opt_(opt), st_(st) {}

  Probe measure(double beta, std::size_t window) {
    const auto policies = beta_to_policy(curves_, beta, opt_.price_band);
    const EpochMeasurement m = env_.run_epoch(policies, window);
    st_.history.push_back({st_.history.size(), beta, m.throughput, m.throughput_stderr, window});
    ++st_.epochs;
    return {beta, m.throughput, m.throughput_stderr};
  }

  // +1 when a is clearly larger, -1 when b is, 0 when the intervals overlap
  // even at the largest window.
  int compare(double beta_a, double beta_b, Probe& a, Probe& b) {
    std::size_t w = opt_.window;
    for (;;) {
      const double gap = a.value - b.value;
      const double se = std::hypot(a.stderr_, b.stderr_);
      if (gap > opt_.separation_z * se) return 1;
      if (-gap > opt_.separation_z * se) return -1;
      if (w * 2 > opt_.max_window) return 0;
      w *= 2;
      a = measure(beta_a, w);
      b = measure(beta_b, w);
    }
  }

  bool same_policies(double b1, double b2) const {
    const auto p1 = beta_to_policy(curves_, b1, opt_.price_band);
    const auto p2 = beta_to_policy(curves_, b2, opt_.price_band);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      if (p1[i].atoms.size() != p2[i].atoms.size()) return false;
      for (std::size_t j = 0; j < p1[i].atoms.size(); ++j)
        if (p1[i].atoms[j].weight != p2[i].atoms[j].weight ||
            p1[i].atoms[j].max_time != p2[i].atoms[j].max_time)
          return false;
    }
    return true;
  }

 private:
  LocalCurves curves_;
  ControllerEnvironment& env_;
  const ControllerOptions& opt_;
  ControllerState& st_;
};

}  // namespace

ControllerState run_finite(LocalCurves curves, ControllerEnvironment& env,
                           const ControllerOptions& opt) {
  if (opt.window < 1000) throw InvalidSpec("measurement window must be >= 1e3 arrivals");
  ControllerState st;
  FiniteSearch search(curves, env, opt, st);

  // Doubling phase: find k* with R(2^k*) > R(2^(k*+1)).
  int k = 1;
  Probe cur = search.measure(std::ldexp(1.0, k), opt.window);
  bool inconclusive = false;
  for (; k < opt.max_doublings; ++k) {
    const double b_cur = std::ldexp(1.0, k), b_next = std::ldexp(1.0, k + 1);
    if (search.same_policies(b_cur, b_next)) break;  // every class already saturated
    Probe next = search.measure(b_next, opt.window);
    const int c = search.compare(b_cur, b_next, cur, next);
    if (c > 0) break;
    if (c == 0) {
      inconclusive = true;
      break;
    }
    cur = next;
  }
  st.k_star = k;
  if (inconclusive) st.diagnostic = "doubling comparison did not separate at the largest window";

  // Golden section on beta over (0, 2^(k*+1)]; ties move right.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = std::ldexp(1.0, k + 1);
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  Probe pc = search.measure(c, opt.window), pd = search.measure(d, opt.window);
  while (hi - lo > opt.bracket_tol * std::ldexp(1.0, k + 1) && st.epochs < opt.max_epochs * 4) {
    if (pc.value > pd.value) {
      hi = d;
      d = c;
      pd = pc;
      c = hi - g * (hi - lo);
      pc = search.measure(c, opt.window);
    } else {
      lo = c;
      c = d;
      pc = pd;
      d = lo + g * (hi - lo);
      pd = search.measure(d, opt.window);
    }
  }
  st.beta = 0.5 * (lo + hi);
  const Probe fin = search.measure(st.beta, opt.final_window);
  st.measured = fin.value;
  st.measured_stderr = fin.stderr_;
  st.converged = !inconclusive;
  return st;
}

}  // namespace tdcache
