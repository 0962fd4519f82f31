#pragma once

namespace tdcache {

// Erlang-B blocking with L servers at offered load a erlangs. Integer L uses the
// recurrence; fractional L uses the continued extension.
double erlang_b(double L, double a);
double erlang_b_recurrence(unsigned L, double a);
// Direct ratio of sums, only for L <= 170.
double erlang_b_direct(unsigned L, double a);
// Continued Erlang-B from 1/B(x,a) = a * int_0^inf e^{-az} (1+z)^x dz, evaluated
// directly by quadrature for any real x >= 0.
double erlang_b_integral(double x, double a);
// dB/da at fixed L.
double erlang_b_load_derivative(double L, double a);

// Diffusion approximation with peakedness z.
double diffusion_blocking(double L, double a, double z);

// Peakedness from the mean caching time s and int_0^inf (1-G(x))^2 dx.
double peakedness(double s, double survival_sq_integral, double c2);

// B(uL, ua) with u = 1 / max(c2, 1).
double blocking_upper_bound(double L, double a, double c2);
double variability_scale(double c2);

// 1 - L/a, valid only for a > L.
double heavy_traffic_blocking(double L, double a);

}  // namespace tdcache
