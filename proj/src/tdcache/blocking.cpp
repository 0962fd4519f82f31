#include "tdcache/blocking.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "tdcache/errors.hpp"
#include "tdcache/numeric.hpp"

namespace tdcache {
namespace {

void check_args(double L, double a) {
  if (!(L >= 0.0) || !std::isfinite(L)) throw DomainError("servers must be finite and >= 0");
  if (!(a >= 0.0)) throw DomainError("offered load must be >= 0");
}

double gk(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-14, &err);
}

}  // namespace

double erlang_b_recurrence(unsigned L, double a) {
  check_args(L, a);
  if (a == kInf) return 1.0;
  double b = 1.0;
  for (unsigned l = 1; l <= L; ++l) b = a * b / (l + a * b);
  return b;
}

double erlang_b_direct(unsigned L, double a) {
  check_args(L, a);
  if (L > 170) throw DomainError("direct Erlang-B sum overflows beyond 170 servers");
  double term = 1.0, sum = 1.0;
  for (unsigned l = 1; l <= L; ++l) {
    term *= a / l;
    sum += term;
  }
  return term / sum;
}

double erlang_b_integral(double x, double a) {
  check_args(x, a);
  if (a == 0.0) return x > 0.0 ? 0.0 : 1.0;
  if (x == 0.0) return 1.0;
  // Scale by the integrand's peak so large x does not overflow.
  const double peak = std::max(0.0, x / a - 1.0);
  const double log_peak = -a * peak + x * std::log1p(peak);
  auto g = [&](double z) { return std::exp(-a * z + x * std::log1p(z) - log_peak); };
  double integral = 0.0;
  if (peak > 0.0) integral += gk(g, 0.0, peak);
  // Split the tail at a few widths past the peak so the infinite part is smooth.
  const double width = std::sqrt(std::max(x, 1.0)) / a + 1.0 / a;
  const double mid = peak + 8.0 * width;
  integral += gk(g, peak, mid);
  integral += gk(g, mid, kInf);
  return std::exp(-log_peak) / (a * integral);
}

double erlang_b(double L, double a) {
  check_args(L, a);
  const double whole = std::floor(L);
  if (whole == L && L <= 4294967295.0) return erlang_b_recurrence(static_cast<unsigned>(L), a);
  if (a == 0.0) return 0.0;
  // Continued B on the fractional part, then the recurrence, which the extension obeys.
  const double frac = L - whole;
  double b = erlang_b_integral(frac, a);
  for (double y = frac + 1.0; y <= L + 1e-9; y += 1.0) b = a * b / (y + a * b);
  return b;
}

double erlang_b_load_derivative(double L, double a) {
  const double b = erlang_b(L, a);
  if (a == 0.0) return L == 1.0 ? 1.0 : (L < 1.0 ? kInf : 0.0);
  return b * (L / a - 1.0 + b);
}

double diffusion_blocking(double L, double a, double z) {
  check_args(L, a);
  if (!(z > 0.0)) throw DomainError("peakedness must be positive");
  if (a == 0.0) return L > 0.0 ? 0.0 : 1.0;
  const double x = (L - a) / std::sqrt(a * z);
  double ratio;  // phi(x) / Phi(x)
  if (x > -30.0) {
    ratio = normal_pdf(x) / normal_cdf(x);
  } else {
    // Mills-ratio expansion of Phi(x) for x far in the lower tail.
    const double x2 = x * x;
    ratio = -x / (1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2));
  }
  return std::clamp(std::sqrt(z / a) * ratio, 0.0, 1.0);
}

double peakedness(double s, double survival_sq_integral, double c2) {
  if (!(c2 >= 0.0)) throw DomainError("c2 must be >= 0");
  if (!(s > 0.0)) throw DomainError("peakedness needs a positive mean caching time");
  if (survival_sq_integral < 0.0 || survival_sq_integral > s * (1.0 + 1e-9))
    throw DomainError("inconsistent caching-time law: int (1-G)^2 must lie in [0, s]");
  return 1.0 + (c2 - 1.0) / s * survival_sq_integral;
}

double variability_scale(double c2) {
  if (!(c2 >= 0.0)) throw DomainError("c2 must be >= 0");
  return 1.0 / std::max(c2, 1.0);
}

double blocking_upper_bound(double L, double a, double c2) {
  const double u = variability_scale(c2);
  return erlang_b(u * L, u * a);
}

double heavy_traffic_blocking(double L, double a) {
  check_args(L, a);
  if (!(a > L)) throw PreconditionError("heavy-traffic blocking needs load above the server count");
  return 1.0 - L / a;
}

}  // namespace tdcache
