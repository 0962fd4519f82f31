#include "tdcache/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tdcache/blocking.hpp"
#include "tdcache/errors.hpp"

namespace tdcache {

void FlowSpec::validate() const {
  if (classes.empty()) throw InvalidSpec("flow has no classes");
  double sum = 0.0;
  for (const auto& c : classes) {
    if (!std::isfinite(c.weight) || c.weight < 0.0)
      throw InvalidSpec("class weight must be >= 0: " + c.label);
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidSpec("class weights must sum to 1");
  if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate))
    throw InvalidSpec("arrival rate must be positive");
  if (!(bits_per_item > 0.0) || !std::isfinite(bits_per_item))
    throw InvalidSpec("bits per item must be positive");
  if (!(c2 >= 0.0) || !std::isfinite(c2)) throw InvalidSpec("c2 must be >= 0");
}

Flow::Flow(FlowSpec spec, const CurveOptions& options) : spec_(std::move(spec)) {
  spec_.validate();
  for (const auto& c : spec_.classes) {
    auto rdi = std::make_shared<const Rdi>(c.rdi);
    curves_.push_back(std::make_shared<const RateCostCurve>(RateCostCurve::build(rdi, options)));
  }
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    const double w = weight(i);
    if (w <= 0.0) continue;
    r_sup_ += w * curves_[i]->r_sup();
    s_sup_ += w * curves_[i]->s_sup();
  }
}

std::vector<double> fills_at_price(std::span<const std::shared_ptr<const RateCostCurve>> curves,
                                   double beta) {
  std::vector<double> r(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) r[i] = curves[i]->max_fill_at_price(beta);
  return r;
}

namespace {

double weighted_sum(const Flow& flow, const std::vector<double>& r) {
  double v = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (flow.weight(i) > 0.0) v += flow.weight(i) * r[i];
  return v;
}

void check_target(const Flow& flow, double r_target) {
  if (!(r_target >= 0.0)) throw DomainError("target hit ratio must be >= 0");
  const double sup = flow.feasible_sup();
  const bool attained = std::isfinite(flow.s_sup());
  if (r_target > sup + 1e-12 || (!attained && r_target >= sup)) {
    std::ostringstream os;
    os.precision(10);
    os << "target hit ratio " << r_target << " is not below the feasible sup " << sup;
    throw InfeasibleError(os.str());
  }
}

Allocation finish(const Flow& flow, double beta, const std::vector<double>& r) {
  Allocation a;
  a.beta = beta;
  a.hit_ratio = 0.0;
  a.cost = 0.0;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const double w = flow.weight(i);
    if (w <= 0.0 || r[i] <= 0.0) {
      a.classes.push_back({0.0, 0.0, CachePolicy::never()});
      continue;
    }
    const double ri = std::min(r[i], flow.curve(i).r_sup());
    const double si = flow.curve(i).envelope(ri);
    a.classes.push_back({ri, si, flow.curve(i).policy_for_target(ri)});
    a.hit_ratio += w * ri;
    a.cost += w * si;
  }
  return a;
}

}  // namespace

Allocation allocate(const Flow& flow, double r_target) {
  check_target(flow, r_target);
  r_target = std::min(r_target, flow.feasible_sup());
  if (r_target == 0.0) return finish(flow, 0.0, std::vector<double>(flow.size(), 0.0));
  auto fills = [&](double beta) { return fills_at_price(flow.curves(), beta); };
  double lo = 0.0, hi = 1.0;
  while (weighted_sum(flow, fills(hi)) < r_target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw InfeasibleError("no finite price reaches the target hit ratio");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (weighted_sum(flow, fills(mid)) >= r_target)
      hi = mid;
    else
      lo = mid;
  }
  const std::vector<double> r_lo = fills(lo);
  const std::vector<double> r_hi = fills(hi);
  const double total_lo = weighted_sum(flow, r_lo);
  const double total_hi = weighted_sum(flow, r_hi);
  // Classes whose fill jumps inside the final bracket share the remainder in
  // the same proportion of their jump.
  const double theta =
      total_hi > total_lo ? std::clamp((r_target - total_lo) / (total_hi - total_lo), 0.0, 1.0)
                          : 1.0;
  std::vector<double> r(flow.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = r_lo[i] + theta * (r_hi[i] - r_lo[i]);
  return finish(flow, hi, r);
}

Allocation allocate_lp(const Flow& flow, double r_target) {
  for (std::size_t i = 0; i < flow.size(); ++i)
    if (flow.weight(i) > 0.0 && flow.curve(i).classification() != CurveClass::linear_alpha)
      throw PreconditionError("class " + flow.spec().classes[i].label +
                              " is not linear_alpha; use allocate");
  check_target(flow, r_target);
  std::vector<std::size_t> order(flow.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return flow.curve(a).alpha() < flow.curve(b).alpha();
  });
  std::vector<double> r(flow.size(), 0.0);
  double remaining = std::min(r_target, flow.feasible_sup());
  double beta = 0.0;
  for (std::size_t i : order) {
    const double w = flow.weight(i);
    if (w <= 0.0 || remaining <= 0.0) continue;
    const double cap = flow.curve(i).r_sup();
    beta = flow.curve(i).alpha();
    if (remaining >= w * cap) {
      r[i] = cap;
      remaining -= w * cap;
    } else {
      r[i] = remaining / w;
      remaining = 0.0;
    }
  }
  return finish(flow, beta, r);
}

EndpointDerivatives endpoint_derivatives(const Flow& flow) {
  EndpointDerivatives d{0.0, kInf};
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (flow.weight(i) <= 0.0 || flow.curve(i).r_sup() <= 0.0) continue;
    const double first = flow.curve(i).initial_slope();
    const double last = flow.curve(i).final_slope();
    d.at_zero = std::max(d.at_zero, first > 0.0 ? 1.0 / first : kInf);
    d.at_sup = std::min(d.at_sup, std::isfinite(last) ? 1.0 / last : 0.0);
  }
  if (d.at_sup == kInf) d.at_sup = 0.0;
  return d;
}

OverallCurve OverallCurve::build(const Flow& flow) {
  OverallCurve c;
  c.s_sup_ = flow.s_sup();
  c.r_sup_ = flow.feasible_sup();
  c.asymptotic_ = !std::isfinite(c.s_sup_);

  double beta_max = 1e8;
  if (!c.asymptotic_) {
    beta_max = 1.0;
    for (std::size_t i = 0; i < flow.size(); ++i)
      if (flow.weight(i) > 0.0) beta_max = std::max(beta_max, flow.curve(i).final_slope());
    beta_max = 2.0 * beta_max + 1.0;
  }
  auto eval = [&](double beta) {
    const std::vector<double> r = fills_at_price(flow.curves(), beta);
    CurvePoint p{0.0, 0.0};
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double w = flow.weight(i);
      if (w <= 0.0) continue;
      p.r += w * r[i];
      p.s += w * flow.curve(i).envelope(r[i]);
    }
    return p;
  };

  struct Node {
    double beta;
    CurvePoint p;
  };
  std::vector<Node> nodes;
  const double beta_min = 1e-8;
  const int coarse = 256;
  for (int k = 0; k <= coarse; ++k) {
    const double beta = beta_min * std::pow(beta_max / beta_min, static_cast<double>(k) / coarse);
    nodes.push_back({beta, eval(beta)});
  }

  const double tol = 1e-7;
  std::vector<CurvePoint> out{{0.0, 0.0}};
  auto refine = [&](auto&& self, const Node& a, const Node& b, int depth) -> void {
    const double ds = b.p.s - a.p.s, dr = b.p.r - a.p.r;
    if ((std::abs(ds) < 1e-12 && std::abs(dr) < 1e-12) || depth > 60 ||
        b.beta / a.beta < 1.0 + 1e-12) {
      out.push_back(b.p);
      return;
    }
    const Node m{std::sqrt(a.beta * b.beta), eval(std::sqrt(a.beta * b.beta))};
    const double len = std::hypot(ds, dr);
    const double dist = std::abs(ds * (m.p.r - a.p.r) - dr * (m.p.s - a.p.s)) / len;
    const bool at_end = std::hypot(m.p.s - a.p.s, m.p.r - a.p.r) < 1e-12 ||
                        std::hypot(m.p.s - b.p.s, m.p.r - b.p.r) < 1e-12;
    if (dist <= tol && !at_end) {
      out.push_back(m.p);
      out.push_back(b.p);
      return;
    }
    self(self, a, m, depth + 1);
    self(self, m, b, depth + 1);
  };
  out.push_back(nodes.front().p);
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) refine(refine, nodes[k], nodes[k + 1], 0);

  std::vector<CurvePoint> table;
  for (const auto& p : out) {
    if (!table.empty()) {
      const CurvePoint& last = table.back();
      if (p.s < last.s || p.r < last.r || (p.s == last.s && p.r == last.r)) continue;
    }
    table.push_back(p);
  }
  c.table_ = std::move(table);
  c.step_ = 1e-6 * std::max(1.0, c.table_.back().s);
  return c;
}

double OverallCurve::r_breve(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= table_.back().s) return table_.back().r;
  auto it = std::lower_bound(table_.begin(), table_.end(), s,
                             [](const CurvePoint& p, double x) { return p.s < x; });
  const CurvePoint& b = *it;
  const CurvePoint& a = *(it - 1);
  if (b.s == a.s) return b.r;
  return a.r + (b.r - a.r) * (s - a.s) / (b.s - a.s);
}

double OverallCurve::s_star(double r) const {
  if (r <= 0.0) return 0.0;
  if (r > r_sup_ + 1e-12) throw InfeasibleError("hit ratio exceeds the feasible sup");
  if (r > table_.back().r) return asymptotic_ ? kInf : table_.back().s;
  auto it = std::lower_bound(table_.begin(), table_.end(), r,
                             [](const CurvePoint& p, double x) { return p.r < x; });
  const CurvePoint& b = *it;
  const CurvePoint& a = *(it - 1);
  if (b.r == a.r) return a.s;
  return a.s + (b.s - a.s) * (r - a.r) / (b.r - a.r);
}

double OverallCurve::left_derivative(double s) const {
  if (s <= 0.0) return right_derivative(0.0);
  const double h = std::min(step_, s);
  return std::max(0.0, (r_breve(s) - r_breve(s - h)) / h);
}

double OverallCurve::right_derivative(double s) const {
  if (s >= s_max()) return 0.0;
  const double h = step_;
  return std::max(0.0, (r_breve(s + h) - r_breve(s)) / h);
}

double OverallCurve::derivative(double s) const {
  if (s <= step_) return right_derivative(std::max(s, 0.0));
  if (s + step_ >= s_max()) return left_derivative(s);
  return std::max(0.0, (r_breve(s + step_) - r_breve(s - step_)) / (2.0 * step_));
}

CachingTimeLaw::CachingTimeLaw(const Flow& flow, std::span<const CachePolicy> policies) {
  if (policies.size() != flow.size()) throw InvalidSpec("one policy per class is required");
  breaks_.push_back(0.0);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const double w = flow.weight(i);
    if (w <= 0.0) continue;
    policies[i].validate();
    auto rdi = flow.curve(i).rdi_ptr();
    for (const auto& a : policies[i].atoms) {
      if (a.skip() || a.weight <= 0.0) continue;
      parts_.push_back({w * a.weight, *a.max_time, rdi});
      breaks_.push_back(*a.max_time);
    }
    for (const auto& c : rdi->components()) {
      breaks_.push_back(c.scale * c.base.lower() + c.shift);
      breaks_.push_back(c.scale * c.base.upper() + c.shift);
    }
    for (const auto& a : rdi->atoms()) breaks_.push_back(a.location);
  }
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
  while (!breaks_.empty() && !std::isfinite(breaks_.back())) breaks_.pop_back();
}

double CachingTimeLaw::survival(double x) const {
  if (x < 0.0) return 1.0;
  double v = 0.0;
  for (const auto& p : parts_) {
    if (!(x < p.max_time)) continue;
    v += p.weight * std::max(0.0, 1.0 + p.rdi->undemand_prob() - p.rdi->cdf(x));
  }
  return v;
}

double CachingTimeLaw::cdf(double x) const {
  if (x < 0.0) return 0.0;
  return 1.0 - survival(x);
}

double CachingTimeLaw::integrate_piecewise(bool squared) const {
  auto f = [&](double x) {
    const double v = survival(x);
    return squared ? v * v : v;
  };
  bool unbounded = false;
  for (const auto& p : parts_) {
    if (p.max_time == kInf) {
      if (!std::isfinite(mean_caching_time(*p.rdi, kInf))) return kInf;
      unbounded = true;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k)
    total += integrate(f, breaks_[k], breaks_[k + 1], 1e-12);
  if (unbounded) total += integrate(f, breaks_.empty() ? 0.0 : breaks_.back(), kInf, 1e-12);
  return total;
}

double CachingTimeLaw::mean() const { return integrate_piecewise(false); }

double CachingTimeLaw::survival_sq_integral() const { return integrate_piecewise(true); }

PolicyStats policy_stats(const Flow& flow, std::span<const CachePolicy> policies) {
  if (policies.size() != flow.size()) throw InvalidSpec("one policy per class is required");
  PolicyStats st{0.0, 0.0};
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const double w = flow.weight(i);
    if (w <= 0.0) continue;
    policies[i].validate();
    st.hit_ratio += w * hit_ratio(flow.rdi(i), policies[i]);
    st.mean_caching_time += w * mean_caching_time(flow.rdi(i), policies[i]);
  }
  return st;
}

double peakedness(const CachingTimeLaw& law, double s, double c2) {
  const double m = law.mean();
  if (std::abs(m - s) > 1e-6 * std::max(1.0, s))
    throw DomainError("caching-time law mean does not match s");
  if (c2 == 1.0) return 1.0;
  return peakedness(s, law.survival_sq_integral(), c2);
}

}  // namespace tdcache
