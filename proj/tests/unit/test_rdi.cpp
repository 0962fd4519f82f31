#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "tdcache/errors.hpp"
#include "tdcache/presets.hpp"
#include "tdcache/rdi.hpp"

using namespace tdcache;

namespace {

struct FamilyCase {
  Family family;
  std::vector<double> params;
  double lo, hi;  // interior window for quadrature checks
};

std::vector<FamilyCase> families() {
  return {{Family::exponential, {1.5}, 0.0, 6.0},
          {Family::uniform, {0.5, 2.0}, 0.6, 1.9},
          {Family::triangular, {0.0, 2.0, 0.5}, 0.1, 1.9},
          {Family::pareto, {1.0, 1.0}, 1.0, 50.0},
          {Family::pareto, {2.5, 0.5}, 0.5, 20.0},
          {Family::arcsine, {2.0}, 0.3, 1.7}};
}

}  // namespace

TEST(BaseDistribution, DensityIntegratesToCdf) {
  for (const auto& c : families()) {
    BaseDistribution d(c.family, c.params);
    const double mass = oracle::simpson([&](double y) { return d.pdf(y); }, c.lo, c.hi);
    EXPECT_NEAR(mass, d.cdf(c.hi) - d.cdf(c.lo), 1e-8) << family_name(c.family);
  }
}

TEST(BaseDistribution, PartialMeanMatchesQuadrature) {
  for (const auto& c : families()) {
    BaseDistribution d(c.family, c.params);
    const double m = oracle::simpson([&](double y) { return y * d.pdf(y); }, c.lo, c.hi);
    EXPECT_NEAR(m, d.partial_mean(c.hi) - d.partial_mean(c.lo), 1e-7) << family_name(c.family);
  }
}

TEST(BaseDistribution, QuantileInvertsCdf) {
  for (const auto& c : families()) {
    BaseDistribution d(c.family, c.params);
    for (int k = 1; k < 100; ++k) {
      const double z = k / 100.0;
      EXPECT_NEAR(d.cdf(d.quantile(z)), z, 1e-10) << family_name(c.family) << " z=" << z;
    }
  }
}

TEST(BaseDistribution, DensityDerivativeMatchesDifference) {
  for (const auto& c : families()) {
    BaseDistribution d(c.family, c.params);
    for (int k = 1; k < 20; ++k) {
      const double y = c.lo + (c.hi - c.lo) * (k + 0.37) / 21.0;
      const double h = 1e-6 * std::max(1.0, std::abs(y));
      const double fd = (d.pdf(y + h) - d.pdf(y - h)) / (2 * h);
      EXPECT_NEAR(d.pdf_derivative(y), fd, 1e-5 * std::max(1.0, std::abs(fd)))
          << family_name(c.family) << " y=" << y;
    }
  }
}

TEST(BaseDistribution, MeansAreClosedForm) {
  EXPECT_NEAR(BaseDistribution(Family::exponential, std::vector<double>{2.0}).mean(), 0.5, 1e-15);
  EXPECT_NEAR(BaseDistribution(Family::uniform, std::vector<double>{0.0, 3.0}).mean(), 1.5, 1e-15);
  EXPECT_NEAR(BaseDistribution(Family::triangular, std::vector<double>{0.0, 2.0, 1.0}).mean(), 1.0,
              1e-15);
  EXPECT_NEAR(BaseDistribution(Family::arcsine, std::vector<double>{2.0}).mean(), 1.0, 1e-15);
  EXPECT_NEAR(BaseDistribution(Family::pareto, std::vector<double>{3.0, 1.0}).mean(), 1.5, 1e-15);
  EXPECT_TRUE(std::isinf(BaseDistribution(Family::pareto, std::vector<double>{1.0, 1.0}).mean()));
}

TEST(BaseDistribution, RejectsBadParameters) {
  EXPECT_THROW(BaseDistribution(Family::exponential, std::vector<double>{-1.0}), InvalidSpec);
  EXPECT_THROW(BaseDistribution(Family::uniform, std::vector<double>{2.0, 1.0}), InvalidSpec);
  EXPECT_THROW(BaseDistribution(Family::triangular, std::vector<double>{0.0, 1.0, 2.0}), InvalidSpec);
  EXPECT_THROW(BaseDistribution(Family::pareto, std::vector<double>{0.0, 1.0}), InvalidSpec);
  EXPECT_THROW(BaseDistribution(Family::arcsine, std::vector<double>{0.0}), InvalidSpec);
  EXPECT_THROW(BaseDistribution(Family::uniform, std::vector<double>{0.0}), InvalidSpec);
}

TEST(Rdi, PresetMoments) {
  struct Row {
    const char* name;
    double q, nu, t_inf, t_sup;
  };
  const Row rows[] = {{"p1", 0.0, 1.0, 0.0, kInf},  {"p2", 0.0, 0.5, 0.0, 1.0},
                      {"p3", 0.0, 1.0, 0.0, 2.0},   {"p4", 0.0, kInf, 1.0, kInf},
                      {"p5", 0.0, 1.0, 0.0, 2.0},   {"p6", 0.4, 0.6, 0.0, kInf},
                      {"p7", 0.0, 1.0, 0.0, 2.0},   {"p8", 0.0, 2.0, 1.0, 3.0},
                      {"p9", 0.6, kInf, 1.0, kInf}, {"p10", 0.0, 1.0, 0.0, 2.0}};
  for (const auto& r : rows) {
    const Rdi rdi(preset_rdi(r.name));
    const Moments& m = rdi.moments();
    EXPECT_NEAR(m.q, r.q, 1e-12) << r.name;
    if (std::isinf(r.nu))
      EXPECT_TRUE(std::isinf(m.nu)) << r.name;
    else
      EXPECT_NEAR(m.nu, r.nu, 1e-10) << r.name;
    EXPECT_NEAR(m.t_inf, r.t_inf, 1e-12) << r.name;
    if (std::isinf(r.t_sup))
      EXPECT_TRUE(std::isinf(m.t_sup)) << r.name;
    else
      EXPECT_NEAR(m.t_sup, r.t_sup, 1e-12) << r.name;
  }
}

TEST(Rdi, RateShiftAddsAnAtom) {
  const Rdi p10(preset_rdi("p10"));
  ASSERT_EQ(p10.atoms().size(), 1u);
  EXPECT_DOUBLE_EQ(p10.atoms()[0].location, 1.0);
  EXPECT_NEAR(p10.atoms()[0].weight, 0.2, 1e-15);
  // The atom is counted by cdf at its location but not by cdf_left.
  EXPECT_NEAR(p10.cdf(1.0) - p10.cdf_left(1.0), 0.2, 1e-12);
}

TEST(Rdi, TransformsActOnCdf) {
  const Rdi p1(preset_rdi("p1")), p2(preset_rdi("p2")), p3(preset_rdi("p3"));
  const Rdi p6(preset_rdi("p6")), p7(preset_rdi("p7")), p8(preset_rdi("p8"));
  for (int k = 0; k <= 40; ++k) {
    const double x = 0.1 * k;
    EXPECT_NEAR(p7.cdf(x), p2.cdf(x / 2.0), 1e-14) << x;
    EXPECT_NEAR(p8.cdf(x + 1.0), p3.cdf(x), 1e-14) << x;
    // Thinning keeps the shape and moves mass to "never requested".
    EXPECT_NEAR(p6.cdf(x) - p6.undemand_prob(), 0.6 * (p1.cdf(x) - p1.undemand_prob()), 1e-14) << x;
  }
}

TEST(Rdi, CdfAndQuantileAreMonotone) {
  for (const auto& name : preset_rdi_names()) {
    const Rdi rdi(preset_rdi(name));
    double prev = rdi.cdf(-1.0);
    EXPECT_NEAR(prev, rdi.undemand_prob(), 1e-15) << name;
    for (int k = 0; k <= 400; ++k) {
      const double c = rdi.cdf(0.025 * k);
      EXPECT_GE(c, prev - 1e-15) << name;
      EXPECT_LE(c, 1.0 + 1e-15) << name;
      prev = c;
    }
    const double q = rdi.undemand_prob();
    double qprev = -kInf;
    for (int k = 1; k < 50; ++k) {
      const double z = q + (1.0 - q) * k / 50.0;
      const double x = rdi.quantile(z);
      EXPECT_GE(x, qprev) << name;
      EXPECT_GE(rdi.cdf(x), z - 1e-9) << name;
      qprev = x;
    }
  }
}

TEST(Rdi, PartialExpectationMatchesQuadrature) {
  for (const char* name : {"p1", "p3", "p6", "p7", "p8"}) {
    const Rdi rdi(preset_rdi(name));
    for (double t : {0.5, 1.5, 2.5}) {
      const double lo = rdi.moments().t_inf;
      if (t <= lo) continue;
      const double ref = oracle::simpson([&](double x) { return x * rdi.pdf(x); }, lo, t, 1e-12);
      EXPECT_NEAR(rdi.partial_expectation(t), ref, 1e-8) << name << " t=" << t;
    }
  }
}

TEST(Rdi, SamplesFollowTheDistribution) {
  Rng rng(7);
  const Rdi p6(preset_rdi("p6"));
  const int n = 200000;
  int never = 0;
  double sum = 0.0;
  int below_one = 0;
  for (int i = 0; i < n; ++i) {
    const auto x = p6.sample(rng);
    if (!x) {
      ++never;
      continue;
    }
    sum += *x;
    below_one += *x <= 1.0;
  }
  const double q = static_cast<double>(never) / n;
  EXPECT_NEAR(q, 0.4, 4.0 * std::sqrt(0.24 / n));
  EXPECT_NEAR(sum / (n - never), 1.0, 4.0 / std::sqrt(n - never));
  const double p = 1.0 - std::exp(-1.0);
  EXPECT_NEAR(static_cast<double>(below_one) / (n - never), p, 4.0 * std::sqrt(p * (1 - p) / (n - never)));
}

TEST(Rdi, RejectsMalformedSpecs) {
  EXPECT_THROW(Rdi(uniform(0.0, 1.0).then(density_scale(1.5))), InvalidSpec);
  EXPECT_THROW(Rdi(uniform(0.0, 1.0).then(time_scale(0.0))), InvalidSpec);
  EXPECT_THROW(Rdi(mixture({0.5, 0.6}, {uniform(0, 1), exponential(1)})), InvalidSpec);
  EXPECT_THROW(Rdi(point_mass(-1.0)), InvalidSpec);
}
