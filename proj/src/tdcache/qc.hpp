#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <optional>
#include <utility>
#include <vector>

namespace tdcache {

// Discriminant that decides quasi-concavity of the Erlang-B objective for L slots.
// Requires L >= 6 and 1 <= l <= L - 5.
mpq_class qc_discriminant(unsigned L, unsigned l);
// (L+l)! times the discriminant; same sign, integer valued.
mpz_class qc_discriminant_scaled(unsigned L, unsigned l);

// Coefficients a_0..a_{2L-1} of the polynomial whose nonnegativity implies
// quasi-concavity. Requires L >= 6.
std::vector<mpq_class> qc_coefficients(unsigned L);

struct QcSweepResult {
  bool all_nonnegative = true;
  unsigned max_L = 0;
  std::uint64_t evaluated = 0;
  std::optional<std::pair<unsigned, unsigned>> witness;  // first (L, l) with a negative value
  double seconds = 0.0;
};

// Checks every discriminant for 6 <= L <= max_L.
QcSweepResult qc_sweep(unsigned max_L, unsigned threads = 1);

}  // namespace tdcache
