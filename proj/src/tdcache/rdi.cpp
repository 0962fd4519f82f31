#include "tdcache/rdi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tdcache/errors.hpp"

namespace tdcache {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMassTol = 1e-12;

std::size_t param_count(Family f) {
  switch (f) {
    case Family::exponential:
    case Family::arcsine:
      return 1;
    case Family::uniform:
    case Family::pareto:
      return 2;
    case Family::triangular:
      return 3;
  }
  return 0;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidSpec(what);
}

struct Canonical {
  std::vector<Rdi::Component> components;
  std::vector<Atom> atoms;
};

double total_mass(const Canonical& c) {
  double m = 0.0;
  for (const auto& comp : c.components) m += comp.weight;
  for (const auto& a : c.atoms) m += a.weight;
  return m;
}

double lowest_point(const Canonical& c) {
  double lo = kInf;
  for (const auto& comp : c.components)
    if (comp.weight > 0) lo = std::min(lo, comp.scale * comp.base.lower() + comp.shift);
  for (const auto& a : c.atoms)
    if (a.weight > 0) lo = std::min(lo, a.location);
  return lo;
}

Canonical canonicalize(const RdiSpec& spec);

Canonical canonicalize_base(const FamilySpec& f) {
  Canonical c;
  c.components.push_back({1.0, BaseDistribution(f.family, f.params), 1.0, 0.0});
  return c;
}

Canonical canonicalize_base(const PointMassSpec& p) {
  require(std::isfinite(p.location) && p.location >= 0.0,
          "point mass location must be finite and nonnegative");
  Canonical c;
  c.atoms.push_back({p.location, 1.0});
  return c;
}

Canonical canonicalize_base(const MixtureSpec& m) {
  require(!m.components.empty(), "mixture needs at least one component");
  require(m.weights.size() == m.components.size(),
          "mixture weights and components differ in length");
  double sum = 0.0;
  for (double w : m.weights) {
    require(std::isfinite(w) && w >= 0.0, "mixture weights must be nonnegative");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "mixture weights must sum to 1");
  Canonical out;
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    Canonical part = canonicalize(m.components[i]);
    for (auto& comp : part.components) {
      comp.weight *= m.weights[i];
      out.components.push_back(comp);
    }
    for (auto& a : part.atoms) out.atoms.push_back({a.location, a.weight * m.weights[i]});
  }
  return out;
}

void apply(Canonical& c, const Transform& t) {
  switch (t.op) {
    case TransformOp::time_scale:
      require(std::isfinite(t.xi) && t.xi > 0.0, "time_scale needs xi > 0");
      for (auto& comp : c.components) {
        comp.scale /= t.xi;
        comp.shift /= t.xi;
      }
      for (auto& a : c.atoms) a.location /= t.xi;
      break;
    case TransformOp::time_shift:
      require(std::isfinite(t.xi), "time_shift needs a finite xi");
      for (auto& comp : c.components) comp.shift += t.xi;
      for (auto& a : c.atoms) a.location += t.xi;
      require(lowest_point(c) >= 0.0, "time_shift moves support below zero");
      break;
    case TransformOp::density_scale:
      require(std::isfinite(t.xi) && t.xi > 0.0 && t.xi <= 1.0,
              "density_scale needs 0 < xi <= 1");
      for (auto& comp : c.components) comp.weight *= t.xi;
      for (auto& a : c.atoms) a.weight *= t.xi;
      break;
    case TransformOp::rate_shift: {
      const double q = 1.0 - total_mass(c);
      require(std::isfinite(t.xi) && t.xi >= 0.0, "rate_shift needs xi >= 0");
      require(t.xi <= q + kMassTol, "rate_shift xi exceeds the undemand mass of the inner RDI");
      require(std::isfinite(t.zeta) && t.zeta >= 0.0, "rate_shift needs zeta >= 0");
      if (t.xi > 0.0) c.atoms.push_back({t.zeta, std::min(t.xi, q)});
      break;
    }
  }
}

Canonical canonicalize(const RdiSpec& spec) {
  Canonical c = std::visit([](const auto& b) { return canonicalize_base(b); }, spec.base);
  for (const auto& t : spec.transforms) apply(c, t);
  return c;
}

}  // namespace

RdiSpec RdiSpec::then(Transform t) const {
  RdiSpec out = *this;
  out.transforms.push_back(t);
  return out;
}

RdiSpec exponential(double rate) { return {FamilySpec{Family::exponential, {rate}}, {}}; }
RdiSpec uniform(double lo, double hi) { return {FamilySpec{Family::uniform, {lo, hi}}, {}}; }
RdiSpec triangular(double lo, double hi, double mode) {
  return {FamilySpec{Family::triangular, {lo, hi, mode}}, {}};
}
RdiSpec pareto(double shape, double scale) {
  return {FamilySpec{Family::pareto, {shape, scale}}, {}};
}
RdiSpec arcsine(double width) { return {FamilySpec{Family::arcsine, {width}}, {}}; }
RdiSpec point_mass(double location) { return {PointMassSpec{location}, {}}; }
RdiSpec mixture(std::vector<double> weights, std::vector<RdiSpec> components) {
  return {MixtureSpec{std::move(weights), std::move(components)}, {}};
}

Transform time_scale(double xi) { return {TransformOp::time_scale, xi}; }
Transform time_shift(double xi) { return {TransformOp::time_shift, xi}; }
Transform density_scale(double xi) { return {TransformOp::density_scale, xi}; }
Transform rate_shift(double xi, double zeta) { return {TransformOp::rate_shift, xi, zeta}; }

const char* family_name(Family f) {
  switch (f) {
    case Family::exponential: return "exponential";
    case Family::uniform: return "uniform";
    case Family::triangular: return "triangular";
    case Family::pareto: return "pareto";
    case Family::arcsine: return "arcsine";
  }
  return "?";
}

const char* transform_name(TransformOp op) {
  switch (op) {
    case TransformOp::time_scale: return "time_scale";
    case TransformOp::time_shift: return "time_shift";
    case TransformOp::density_scale: return "density_scale";
    case TransformOp::rate_shift: return "rate_shift";
  }
  return "?";
}

BaseDistribution::BaseDistribution(Family family, std::span<const double> params)
    : family_(family), count_(param_count(family)) {
  std::ostringstream msg;
  msg << family_name(family) << " expects " << count_ << " parameter(s), got " << params.size();
  require(params.size() == count_, msg.str());
  for (std::size_t i = 0; i < count_; ++i) {
    require(std::isfinite(params[i]), std::string(family_name(family)) + " parameter not finite");
    params_[i] = params[i];
  }
  const auto& p = params_;
  switch (family) {
    case Family::exponential:
      require(p[0] > 0.0, "exponential rate must be positive");
      break;
    case Family::uniform:
      require(p[0] >= 0.0 && p[1] > p[0], "uniform needs 0 <= lo < hi");
      break;
    case Family::triangular:
      require(p[0] >= 0.0 && p[1] > p[0] && p[2] >= p[0] && p[2] <= p[1],
              "triangular needs 0 <= lo <= mode <= hi with lo < hi");
      break;
    case Family::pareto:
      require(p[0] > 0.0 && p[1] > 0.0, "pareto needs positive shape and scale");
      break;
    case Family::arcsine:
      require(p[0] > 0.0, "arcsine width must be positive");
      break;
  }
}

double BaseDistribution::pdf(double y) const {
  const auto& p = params_;
  switch (family_) {
    case Family::exponential:
      return y < 0.0 ? 0.0 : p[0] * std::exp(-p[0] * y);
    case Family::uniform:
      return (y < p[0] || y > p[1]) ? 0.0 : 1.0 / (p[1] - p[0]);
    case Family::triangular: {
      const double lo = p[0], hi = p[1], m = p[2];
      if (y < lo || y > hi) return 0.0;
      if (y < m) return 2.0 * (y - lo) / ((hi - lo) * (m - lo));
      if (hi == m) return 2.0 / (hi - lo);
      return 2.0 * (hi - y) / ((hi - lo) * (hi - m));
    }
    case Family::pareto:
      return y < p[1] ? 0.0 : p[0] * std::pow(p[1], p[0]) / std::pow(y, p[0] + 1.0);
    case Family::arcsine:
      if (y < 0.0 || y > p[0]) return 0.0;
      return 1.0 / (kPi * std::sqrt(y * (p[0] - y)));
  }
  return 0.0;
}

double BaseDistribution::pdf_derivative(double y) const {
  const auto& p = params_;
  switch (family_) {
    case Family::exponential:
      return y < 0.0 ? 0.0 : -p[0] * p[0] * std::exp(-p[0] * y);
    case Family::uniform:
      return 0.0;
    case Family::triangular: {
      const double lo = p[0], hi = p[1], m = p[2];
      if (y < lo || y > hi) return 0.0;
      if (y < m) return 2.0 / ((hi - lo) * (m - lo));
      if (hi == m) return 0.0;
      return -2.0 / ((hi - lo) * (hi - m));
    }
    case Family::pareto:
      return y < p[1] ? 0.0 : -(p[0] + 1.0) * pdf(y) / y;
    case Family::arcsine: {
      if (y <= 0.0 || y >= p[0]) return 0.0;
      const double g = y * (p[0] - y);
      return -0.5 * (p[0] - 2.0 * y) / (kPi * g * std::sqrt(g));
    }
  }
  return 0.0;
}

double BaseDistribution::cdf(double y) const {
  const auto& p = params_;
  switch (family_) {
    case Family::exponential:
      return y <= 0.0 ? 0.0 : -std::expm1(-p[0] * y);
    case Family::uniform:
      if (y <= p[0]) return 0.0;
      if (y >= p[1]) return 1.0;
      return (y - p[0]) / (p[1] - p[0]);
    case Family::triangular: {
      const double lo = p[0], hi = p[1], m = p[2];
      if (y <= lo) return 0.0;
      if (y >= hi) return 1.0;
      if (y < m) return (y - lo) * (y - lo) / ((hi - lo) * (m - lo));
      return 1.0 - (hi - y) * (hi - y) / ((hi - lo) * (hi - m));
    }
    case Family::pareto:
      return y <= p[1] ? 0.0 : -std::expm1(p[0] * std::log(p[1] / y));
    case Family::arcsine:
      if (y <= 0.0) return 0.0;
      if (y >= p[0]) return 1.0;
      return 2.0 / kPi * std::asin(std::sqrt(y / p[0]));
  }
  return 0.0;
}

double BaseDistribution::partial_mean(double y) const {
  const auto& p = params_;
  if (y == kInf) return mean();
  switch (family_) {
    case Family::exponential: {
      if (y <= 0.0) return 0.0;
      const double x = p[0] * y;
      return (-std::expm1(-x) - x * std::exp(-x)) / p[0];
    }
    case Family::uniform: {
      const double c = std::clamp(y, p[0], p[1]);
      return (c * c - p[0] * p[0]) / (2.0 * (p[1] - p[0]));
    }
    case Family::triangular: {
      const double lo = p[0], hi = p[1], m = p[2];
      if (y <= lo) return 0.0;
      auto rising = [&](double x) {
        if (m == lo) return 0.0;
        return 2.0 / ((hi - lo) * (m - lo)) *
               ((x * x * x - lo * lo * lo) / 3.0 - lo * (x * x - lo * lo) / 2.0);
      };
      if (y <= m) return rising(y);
      const double x = std::min(y, hi);
      return rising(m) + 2.0 / ((hi - lo) * (hi - m)) *
                             (hi * (x * x - m * m) / 2.0 - (x * x * x - m * m * m) / 3.0);
    }
    case Family::pareto: {
      const double a = p[0], b = p[1];
      if (y <= b) return 0.0;
      if (a == 1.0) return b * std::log(y / b);
      return a * std::pow(b, a) / (1.0 - a) * (std::pow(y, 1.0 - a) - std::pow(b, 1.0 - a));
    }
    case Family::arcsine: {
      if (y <= 0.0) return 0.0;
      if (y >= p[0]) return p[0] / 2.0;
      const double theta = std::asin(std::sqrt(y / p[0]));
      return p[0] / kPi * (theta - std::sin(2.0 * theta) / 2.0);
    }
  }
  return 0.0;
}

double BaseDistribution::quantile(double z) const {
  const auto& p = params_;
  z = std::clamp(z, 0.0, 1.0);
  switch (family_) {
    case Family::exponential:
      return z >= 1.0 ? kInf : -std::log1p(-z) / p[0];
    case Family::uniform:
      return p[0] + z * (p[1] - p[0]);
    case Family::triangular: {
      const double lo = p[0], hi = p[1], m = p[2];
      const double fm = (m - lo) / (hi - lo);
      if (z <= fm) return lo + std::sqrt(z * (hi - lo) * (m - lo));
      return hi - std::sqrt((1.0 - z) * (hi - lo) * (hi - m));
    }
    case Family::pareto:
      return z >= 1.0 ? kInf : p[1] * std::pow(1.0 - z, -1.0 / p[0]);
    case Family::arcsine: {
      const double s = std::sin(kPi * z / 2.0);
      return p[0] * s * s;
    }
  }
  return 0.0;
}

double BaseDistribution::mean() const {
  const auto& p = params_;
  switch (family_) {
    case Family::exponential: return 1.0 / p[0];
    case Family::uniform: return (p[0] + p[1]) / 2.0;
    case Family::triangular: return (p[0] + p[1] + p[2]) / 3.0;
    case Family::pareto: return p[0] > 1.0 ? p[0] * p[1] / (p[0] - 1.0) : kInf;
    case Family::arcsine: return p[0] / 2.0;
  }
  return 0.0;
}

double BaseDistribution::lower() const {
  switch (family_) {
    case Family::uniform:
    case Family::triangular: return params_[0];
    case Family::pareto: return params_[1];
    default: return 0.0;
  }
}

double BaseDistribution::upper() const {
  switch (family_) {
    case Family::uniform:
    case Family::triangular: return params_[1];
    case Family::arcsine: return params_[0];
    default: return kInf;
  }
}

Rdi::Rdi(RdiSpec spec) : spec_(std::move(spec)) {
  Canonical c = canonicalize(spec_);
  require(lowest_point(c) >= 0.0, "RDI support must lie in [0, inf)");
  for (auto& comp : c.components)
    if (comp.weight > 0.0) components_.push_back(comp);
  std::sort(c.atoms.begin(), c.atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  for (const auto& a : c.atoms) {
    if (a.weight <= 0.0) continue;
    if (!atoms_.empty() && atoms_.back().location == a.location)
      atoms_.back().weight += a.weight;
    else
      atoms_.push_back(a);
  }
  const double mass = total_mass(c);
  require(mass <= 1.0 + 1e-9, "RDI mass exceeds one");
  moments_.q = std::max(0.0, 1.0 - mass);
  moments_.t_inf = lowest_point(c);
  if (!std::isfinite(moments_.t_inf)) moments_.t_inf = 0.0;
  double sup = 0.0, nu = 0.0;
  for (const auto& comp : components_) {
    sup = std::max(sup, comp.scale * comp.base.upper() + comp.shift);
    nu += comp.weight * (comp.scale * comp.base.mean() + comp.shift);
  }
  for (const auto& a : atoms_) {
    sup = std::max(sup, a.location);
    nu += a.weight * a.location;
  }
  moments_.t_sup = sup;
  moments_.nu = nu;
}

double Rdi::pdf(double x) const {
  double v = 0.0;
  for (const auto& c : components_) v += c.weight / c.scale * c.base.pdf((x - c.shift) / c.scale);
  return v;
}

double Rdi::pdf_derivative(double x) const {
  double v = 0.0;
  for (const auto& c : components_)
    v += c.weight / (c.scale * c.scale) * c.base.pdf_derivative((x - c.shift) / c.scale);
  return v;
}

double Rdi::cdf(double x) const {
  if (x < 0.0) return moments_.q;
  double v = moments_.q;
  for (const auto& c : components_) v += c.weight * c.base.cdf((x - c.shift) / c.scale);
  for (const auto& a : atoms_)
    if (a.location <= x) v += a.weight;
  return std::min(v, 1.0);
}

double Rdi::cdf_left(double x) const {
  if (x <= 0.0) {
    double v = moments_.q;
    return v;
  }
  double v = moments_.q;
  for (const auto& c : components_) v += c.weight * c.base.cdf((x - c.shift) / c.scale);
  for (const auto& a : atoms_)
    if (a.location < x) v += a.weight;
  return std::min(v, 1.0);
}

double Rdi::partial_expectation(double t) const {
  if (t < 0.0) return 0.0;
  double v = 0.0;
  for (const auto& c : components_) {
    const double y = t == kInf ? kInf : (t - c.shift) / c.scale;
    v += c.weight * (c.scale * c.base.partial_mean(y) + c.shift * c.base.cdf(y));
  }
  for (const auto& a : atoms_)
    if (a.location <= t) v += a.weight * a.location;
  return v;
}

double Rdi::quantile(double z) const {
  const double q = moments_.q;
  if (!(z <= 1.0 + kMassTol)) throw DomainError("quantile level above 1");
  if (z < q - kMassTol) throw DomainError("request below undemand mass");
  if (z <= q) return 0.0;
  z = std::min(z, 1.0);
  if (atoms_.empty() && components_.size() == 1) {
    const auto& c = components_.front();
    const double y = c.base.quantile((z - q) / c.weight);
    if (y == kInf) return kInf;
    return std::max(0.0, c.scale * y + c.shift);
  }
  return quantile_bisect(z);
}

double Rdi::quantile_bisect(double z) const {
  if (cdf(0.0) >= z) return 0.0;
  double hi = moments_.t_sup;
  if (hi == kInf) {
    hi = std::max(1.0, moments_.t_inf);
    int doublings = 0;
    while (cdf(hi) < z) {
      if (++doublings > 2100) return kInf;
      hi *= 2.0;
    }
  } else if (cdf(hi) < z) {
    return hi;
  }
  double lo = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cdf(mid) >= z)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::optional<double> Rdi::sample(Rng& rng) const {
  double u = uniform01(rng);
  if (u < moments_.q) return std::nullopt;
  u -= moments_.q;
  for (const auto& c : components_) {
    if (u < c.weight) {
      const double y = c.base.quantile(u / c.weight);
      return c.scale * y + c.shift;
    }
    u -= c.weight;
  }
  for (const auto& a : atoms_) {
    if (u < a.weight) return a.location;
    u -= a.weight;
  }
  // Rounding left a sliver of mass unassigned; attribute it to the last piece.
  if (!atoms_.empty()) return atoms_.back().location;
  if (!components_.empty()) {
    const auto& c = components_.back();
    return c.scale * c.base.quantile(1.0 - 1e-16) + c.shift;
  }
  return std::nullopt;
}

}  // namespace tdcache
