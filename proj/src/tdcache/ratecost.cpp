#include "tdcache/ratecost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdcache/errors.hpp"

namespace tdcache {

double hit_ratio(const Rdi& rdi, double t) {
  if (t < 0.0) throw DomainError("caching time must be >= 0");
  if (t == kInf) return 1.0 - rdi.undemand_prob();
  return std::max(0.0, rdi.cdf(t) - rdi.undemand_prob());
}

double mean_caching_time(const Rdi& rdi, double t) {
  if (t < 0.0) throw DomainError("caching time must be >= 0");
  const double q = rdi.undemand_prob();
  if (t == kInf) return q > 0.0 ? kInf : rdi.moments().nu;
  return rdi.partial_expectation(t) + t * std::max(0.0, 1.0 + q - rdi.cdf(t));
}

double hit_ratio(const Rdi& rdi, const CachePolicy& policy) {
  double r = 0.0;
  for (const auto& a : policy.atoms)
    if (!a.skip() && a.weight > 0.0) r += a.weight * hit_ratio(rdi, *a.max_time);
  return r;
}

double mean_caching_time(const Rdi& rdi, const CachePolicy& policy) {
  double s = 0.0;
  for (const auto& a : policy.atoms)
    if (!a.skip() && a.weight > 0.0) s += a.weight * mean_caching_time(rdi, *a.max_time);
  return s;
}

double rate_cost(const Rdi& rdi, double r) {
  const double q = rdi.undemand_prob();
  if (!(r > 0.0)) throw DomainError("rate_cost needs r > 0");
  if (r > 1.0 - q + 1e-12) throw InfeasibleError("hit ratio exceeds demand probability 1-q");
  const double t = rdi.quantile(std::min(r + q, 1.0));
  return mean_caching_time(rdi, t);
}

double rate_cost_closed_form(Family family, std::span<const double> params, double r) {
  const BaseDistribution base(family, params);
  if (!(r > 0.0) || r > 1.0 + 1e-12) throw DomainError("closed-form rate cost needs 0 < r <= 1");
  r = std::min(r, 1.0);
  const auto p = base.params();
  switch (family) {
    case Family::exponential:
      return r / p[0];
    case Family::uniform: {
      const double w = p[1] - p[0];
      return -0.5 * w * r * r + w * r + p[0];
    }
    case Family::triangular: {
      const double lo = p[0], hi = p[1], m = p[2];
      const double split = (m - lo) / (hi - lo);
      if (r <= split) {
        return lo + std::sqrt((hi - lo) * (m - lo)) * (std::sqrt(r) - r * std::sqrt(r) / 3.0);
      }
      const double tail = 1.0 - r;
      return (lo + hi + m) / 3.0 - std::sqrt((hi - lo) * (hi - m)) * tail * std::sqrt(tail) / 3.0;
    }
    case Family::pareto: {
      const double a = p[0], b = p[1];
      if (r >= 1.0) return a > 1.0 ? a * b / (a - 1.0) : kInf;
      if (a == 1.0) return b * std::log(1.0 / (1.0 - r)) + b;
      return b / (1.0 - a) * (std::pow(1.0 - r, (a - 1.0) / a) - a);
    }
    case Family::arcsine: {
      const double w = p[0];
      const double half = std::sin(std::numbers::pi * r / 2.0);
      return w * ((1.0 - r) * half * half + r / 2.0 -
                  std::sin(std::numbers::pi * r) / (2.0 * std::numbers::pi));
    }
  }
  return 0.0;
}

double static_marginal_cost(const Rdi& rdi, double r) {
  const double q = rdi.undemand_prob();
  const double z = std::min(r + q, 1.0);
  const double t = rdi.quantile(z);
  if (t == kInf) return kInf;
  for (const auto& a : rdi.atoms())
    if (a.location == t && z < rdi.cdf(t) - 1e-15) return 0.0;
  const double p = rdi.pdf(t);
  if (!(p > 0.0)) return kInf;
  return std::max(0.0, 1.0 - r) / p;
}

double curvature(const Rdi& rdi, double r) {
  const double q = rdi.undemand_prob();
  if (!(r > 0.0) || r > 1.0 - q + 1e-12) throw DomainError("curvature needs 0 < r <= 1-q");
  const double t = rdi.quantile(std::min(r + q, 1.0));
  const double p = rdi.pdf(t);
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("rate-cost curve is singular here");
  const double dp = rdi.pdf_derivative(t);
  return -(p * p + (1.0 - r) * dp) / (p * p * p);
}

namespace {

// Indices of the lower hull vertices of points sorted by r.
std::vector<std::size_t> hull_indices(std::span<const CurvePoint> pts, double tol) {
  std::vector<std::size_t> h;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (h.size() >= 2) {
      const CurvePoint& a = pts[h[h.size() - 2]];
      const CurvePoint& b = pts[h.back()];
      const CurvePoint& c = pts[i];
      const double abr = b.r - a.r, abs_ = b.s - a.s;
      const double acr = c.r - a.r, acs = c.s - a.s;
      const double cross = abr * acs - abs_ * acr;
      const double scale = std::hypot(abr, abs_) * std::hypot(acr, acs);
      if (cross <= tol * scale)
        h.pop_back();
      else
        break;
    }
    h.push_back(i);
  }
  return h;
}

double polyline_at(std::span<const CurvePoint> v, double r) {
  if (r <= v.front().r) return v.front().s;
  if (r >= v.back().r) return v.back().s;
  auto it = std::lower_bound(v.begin(), v.end(), r,
                             [](const CurvePoint& p, double x) { return p.r < x; });
  const CurvePoint& b = *it;
  const CurvePoint& a = *(it - 1);
  if (b.r == a.r) return b.s;
  return a.s + (b.s - a.s) * (r - a.r) / (b.r - a.r);
}

}  // namespace

std::vector<CurvePoint> lower_convex_hull(std::span<const CurvePoint> points, double collinear_tol) {
  std::vector<CurvePoint> out;
  for (std::size_t i : hull_indices(points, collinear_tol)) out.push_back(points[i]);
  return out;
}

const char* curve_class_name(CurveClass c) {
  switch (c) {
    case CurveClass::linear_alpha: return "linear_alpha";
    case CurveClass::self_convex: return "self_convex";
    case CurveClass::general: return "general";
  }
  return "?";
}

RateCostCurve RateCostCurve::build(std::shared_ptr<const Rdi> rdi, const CurveOptions& options) {
  if (!rdi) throw InvalidSpec("curve needs an RDI");
  if (options.grid < 8) throw ConfigError("curve grid needs at least 8 points");
  RateCostCurve c;
  c.rdi_ = std::move(rdi);
  const Moments& m = c.rdi_->moments();
  c.r_sup_ = 1.0 - m.q;
  c.s_sup_ = m.nu + (m.q > 0.0 ? m.q * m.t_sup : 0.0);
  c.asymptotic_ = !std::isfinite(c.s_sup_);
  if (c.r_sup_ <= 0.0) {
    c.r_sup_ = 0.0;
    c.s_sup_ = 0.0;
    c.asymptotic_ = false;
    c.vertices_ = {{0.0, 0.0}};
    c.class_ = CurveClass::linear_alpha;
    return c;
  }
  c.r_max_ = c.asymptotic_ ? c.r_sup_ - std::min(options.truncation, 0.5 * c.r_sup_) : c.r_sup_;

  std::vector<CurvePoint> pts;
  pts.reserve(options.grid + 1);
  pts.push_back({0.0, 0.0});
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 1; k <= options.grid; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(options.grid);
    // Half uniform, half clustered toward both ends.
    double r = c.r_max_ * (u - 0.5 * std::sin(two_pi * u) / two_pi);
    if (k == options.grid) r = c.r_max_;
    if (r <= pts.back().r) continue;
    pts.push_back({r, rate_cost(*c.rdi_, r)});
  }

  std::vector<std::size_t> h = hull_indices(pts, 1e-10);
  for (int round = 0; round < options.max_refinements; ++round) {
    std::vector<CurvePoint> fresh;
    for (std::size_t j = 1; j + 1 < h.size(); ++j) {
      const std::size_t i = h[j];
      const bool tangent = h[j - 1] != i - 1 || h[j + 1] != i + 1;
      if (!tangent) continue;
      for (std::size_t nb : {i - 1, i + 1}) {
        const double r = 0.5 * (pts[i].r + pts[nb].r);
        if (r > 0.0 && r != pts[i].r && r != pts[nb].r) fresh.push_back({r, 0.0});
      }
    }
    if (fresh.empty()) break;
    std::vector<CurvePoint> before;
    for (std::size_t i : h) before.push_back(pts[i]);
    for (auto& p : fresh) p.s = rate_cost(*c.rdi_, p.r);
    pts.insert(pts.end(), fresh.begin(), fresh.end());
    std::sort(pts.begin(), pts.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.r < b.r; });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const CurvePoint& a, const CurvePoint& b) { return a.r == b.r; }),
              pts.end());
    h = hull_indices(pts, 1e-10);
    std::vector<CurvePoint> after;
    for (std::size_t i : h) after.push_back(pts[i]);
    double change = 0.0;
    for (const auto& p : fresh)
      change = std::max(change, std::abs(polyline_at(before, p.r) - polyline_at(after, p.r)));
    if (change <= options.refine_tol) break;
  }

  c.samples_.assign(pts.begin() + 1, pts.end());
  for (std::size_t i : h) c.vertices_.push_back(pts[i]);
  const bool origin_on_curve = m.t_inf == 0.0;
  for (std::size_t j = 0; j + 1 < h.size(); ++j) {
    const std::size_t a = h[j], b = h[j + 1];
    const bool on_curve = b == a + 1 && (a != 0 || origin_on_curve);
    EnvelopePiece piece{on_curve, pts[a].r, pts[a].s, pts[b].r, pts[b].s};
    if (on_curve && !c.pieces_.empty() && c.pieces_.back().on_curve) {
      c.pieces_.back().r1 = piece.r1;
      c.pieces_.back().s1 = piece.s1;
    } else {
      c.pieces_.push_back(piece);
    }
  }

  const bool all_curve = std::all_of(c.pieces_.begin(), c.pieces_.end(),
                                     [](const EnvelopePiece& p) { return p.on_curve; });
  if (!c.asymptotic_ && c.pieces_.size() == 1 && !c.pieces_[0].on_curve)
    c.class_ = CurveClass::linear_alpha;
  else if (all_curve)
    c.class_ = CurveClass::self_convex;
  else
    c.class_ = CurveClass::general;
  return c;
}

double RateCostCurve::alpha() const {
  if (r_sup_ <= 0.0) return 0.0;
  return s_sup_ / r_sup_;
}

double RateCostCurve::static_cost(double r) const {
  if (r <= 0.0) return 0.0;
  return rate_cost(*rdi_, std::min(r, r_sup_));
}

const EnvelopePiece* RateCostCurve::piece_at(double r) const {
  if (pieces_.empty() || r > r_max_) return nullptr;
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), r,
                             [](const EnvelopePiece& p, double x) { return p.r1 < x; });
  if (it == pieces_.end()) return &pieces_.back();
  return &*it;
}

double RateCostCurve::envelope(double r) const {
  if (r <= 0.0) return 0.0;
  if (r > r_sup_ + 1e-12) throw InfeasibleError("hit ratio exceeds demand probability 1-q");
  const EnvelopePiece* p = piece_at(r);
  if (p == nullptr || p->on_curve) return static_cost(r);
  if (r >= p->r1) return p->s1;
  return p->s0 + (p->s1 - p->s0) * (r - p->r0) / (p->r1 - p->r0);
}

double RateCostCurve::envelope_slope(double r) const {
  if (pieces_.empty()) return kInf;
  if (r >= r_max_) {
    if (asymptotic_) return static_marginal_cost(*rdi_, r);
    return final_slope();
  }
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), r,
                             [](double x, const EnvelopePiece& p) { return x < p.r1; });
  if (it == pieces_.end()) return final_slope();
  if (!it->on_curve) return it->slope();
  return static_marginal_cost(*rdi_, std::max(r, it->r0));
}

double RateCostCurve::initial_slope() const { return envelope_slope(0.0); }

double RateCostCurve::final_slope() const {
  if (pieces_.empty()) return kInf;
  if (asymptotic_) return kInf;
  const EnvelopePiece& last = pieces_.back();
  if (!last.on_curve) return last.slope();
  const std::size_t n = samples_.size();
  if (n < 2) return last.slope();
  const CurvePoint& a = samples_[n - 2];
  const CurvePoint& b = samples_[n - 1];
  return (b.s - a.s) / (b.r - a.r);
}

double RateCostCurve::max_fill_at_price(double beta) const {
  if (r_sup_ <= 0.0 || pieces_.empty()) return 0.0;
  auto fill_curve = [&](double lo, double hi) {
    // Largest r in [lo, hi] with marginal cost <= beta; marginal is nondecreasing here.
    if (static_marginal_cost(*rdi_, lo) > beta) return lo;
    if (static_marginal_cost(*rdi_, hi) <= beta) return hi;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (static_marginal_cost(*rdi_, mid) <= beta)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  };
  for (const auto& p : pieces_) {
    if (p.on_curve) {
      const double r = fill_curve(p.r0, p.r1);
      if (r < p.r1) return r;
    } else if (p.slope() > beta) {
      return p.r0;
    }
  }
  if (!asymptotic_) return r_sup_;
  const double top = std::nextafter(r_sup_, 0.0);
  return fill_curve(r_max_, top);
}

CachePolicy RateCostCurve::static_policy(double r) const {
  const double q = rdi_->undemand_prob();
  const double t = rdi_->quantile(std::min(r + q, 1.0));
  const double hit = hit_ratio(*rdi_, t);
  if (t == kInf || std::abs(hit - r) <= 1e-12 || t <= 0.0) return CachePolicy::fixed(t);
  // r falls inside an atom jump at t: mix t with the time just below it.
  const double below = std::nextafter(t, 0.0);
  const double hit_below = hit_ratio(*rdi_, below);
  if (hit - hit_below <= 0.0) return CachePolicy::fixed(t);
  const double theta = std::clamp((hit - r) / (hit - hit_below), 0.0, 1.0);
  return CachePolicy{{PolicyAtom{theta, below}, PolicyAtom{1.0 - theta, t}}}.normalized();
}

CachePolicy RateCostCurve::policy_for_target(double r) const {
  if (r < 0.0) throw DomainError("target hit ratio must be >= 0");
  if (r > r_sup_ + 1e-12) throw InfeasibleError("target hit ratio exceeds demand probability 1-q");
  if (r <= 0.0 || r_sup_ <= 0.0) return CachePolicy::never();
  r = std::min(r, r_sup_);
  const EnvelopePiece* p = piece_at(r);
  if (p == nullptr || p->on_curve) return static_policy(r);
  const double env = envelope(r);
  const double stat = static_cost(r);
  if (std::abs(stat - env) <= 1e-9 * std::max(1.0, env)) return static_policy(r);
  const double theta = (p->r1 - r) / (p->r1 - p->r0);
  CachePolicy hi = static_policy(p->r1);
  CachePolicy lo = p->r0 <= 0.0 ? CachePolicy::never() : static_policy(p->r0);
  CachePolicy out;
  for (auto a : lo.atoms) out.atoms.push_back({a.weight * theta, a.max_time});
  for (auto a : hi.atoms) out.atoms.push_back({a.weight * (1.0 - theta), a.max_time});
  return out.normalized();
}

}  // namespace tdcache
