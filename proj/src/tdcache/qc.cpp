#include "tdcache/qc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "tdcache/errors.hpp"

namespace tdcache {
namespace {

void check_range(unsigned L, unsigned l) {
  if (L < 6) throw DomainError("discriminant needs L >= 6");
  if (l < 1 || l > L - 5) throw DomainError("discriminant needs 1 <= l <= L - 5");
}

mpz_class factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

mpz_class binomial(unsigned n, unsigned k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

// Scaled discriminant given C(L+l, L); walks C(L+l, L-i) downward in i.
mpz_class scaled_from(unsigned L, unsigned l, const mpz_class& c_top, mpz_class& work,
                      mpz_class& acc) {
  const unsigned n = L + l;
  acc = c_top;
  acc *= 2UL * (L - l - 1) * L;
  work = c_top;
  for (unsigned i = 1; i + l + 1 <= L; ++i) {
    const unsigned k = L - i;  // C(n, k) from C(n, k + 1)
    mpz_mul_ui(work.get_mpz_t(), work.get_mpz_t(), k + 1);
    mpz_divexact_ui(work.get_mpz_t(), work.get_mpz_t(), n - k);
    const long coef = static_cast<long>(i) * (i + 1) - 2L * L;
    if (coef >= 0)
      mpz_addmul_ui(acc.get_mpz_t(), work.get_mpz_t(), static_cast<unsigned long>(coef));
    else
      mpz_submul_ui(acc.get_mpz_t(), work.get_mpz_t(), static_cast<unsigned long>(-coef));
  }
  return acc;
}

}  // namespace

mpz_class qc_discriminant_scaled(unsigned L, unsigned l) {
  check_range(L, l);
  mpz_class work, acc;
  return scaled_from(L, l, binomial(L + l, L), work, acc);
}

mpq_class qc_discriminant(unsigned L, unsigned l) {
  mpq_class v(qc_discriminant_scaled(L, l), factorial(L + l));
  v.canonicalize();
  return v;
}

std::vector<mpq_class> qc_coefficients(unsigned L) {
  if (L < 6) throw DomainError("coefficients need L >= 6");
  std::vector<mpq_class> a(2 * L);
  const long Ls = L;
  a[0] = Ls * Ls - Ls;
  a[1] = 2 * Ls * Ls - 4 * Ls;
  for (unsigned n = 2; n + 1 <= L; ++n) {
    const long ns = n;
    // 2^n / n! * [(n^2 - n)/4 + L^2 - (n+1)L]
    mpq_class bracket(ns * ns - ns + 4 * (Ls * Ls - (ns + 1) * Ls), 4);
    mpz_class pow2;
    mpz_ui_pow_ui(pow2.get_mpz_t(), 2, n);
    a[n] = bracket * mpq_class(pow2, factorial(n));
    a[n].canonicalize();
  }
  {
    mpz_class pow2;
    mpz_ui_pow_ui(pow2.get_mpz_t(), 2, L - 2);
    mpz_class num = pow2 * (Ls - 5) + Ls + 1;
    a[L] = mpq_class(num, factorial(L - 1));
    a[L].canonicalize();
  }
  for (unsigned l = 1; l + 5 <= L; ++l) a[L + l] = qc_discriminant(L, l);
  a[2 * L - 4] = mpq_class(mpz_class(2), factorial(L - 1) * factorial(L - 2));
  a[2 * L - 4].canonicalize();
  for (unsigned n = 2 * L - 3; n < 2 * L; ++n) a[n] = 0;
  return a;
}

QcSweepResult qc_sweep(unsigned max_L, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  QcSweepResult out;
  out.max_L = max_L;
  if (max_L < 6) return out;
  threads = std::max(1u, threads);
  std::atomic<unsigned> next{6};
  std::atomic<std::uint64_t> count{0};
  std::mutex mu;
  auto worker = [&] {
    mpz_class c_top, work, acc;
    for (unsigned L = next.fetch_add(1); L <= max_L; L = next.fetch_add(1)) {
      c_top = L + 1;  // C(L+1, L)
      std::uint64_t local = 0;
      for (unsigned l = 1; l + 5 <= L; ++l) {
        if (l > 1) {
          mpz_mul_ui(c_top.get_mpz_t(), c_top.get_mpz_t(), L + l);
          mpz_divexact_ui(c_top.get_mpz_t(), c_top.get_mpz_t(), l);
        }
        scaled_from(L, l, c_top, work, acc);
        ++local;
        if (sgn(acc) < 0) {
          std::lock_guard lock(mu);
          out.all_nonnegative = false;
          if (!out.witness || L < out.witness->first) out.witness = std::make_pair(L, l);
        }
      }
      count += local;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  out.evaluated = count;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace tdcache
