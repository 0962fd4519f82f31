#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>

namespace tdcache {

using Rng = std::mt19937_64;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform draw in the open interval (0, 1), identical on every platform.
inline double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Adaptive Gauss-Kronrod on [a, b]; b may be +inf. tol is relative to the L1 norm.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

double normal_pdf(double x);
// Lower normal tail Phi(x), evaluated through erfc so it stays accurate for x << 0.
double normal_cdf(double x);

}  // namespace tdcache
