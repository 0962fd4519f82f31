#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>

#include "oracle.hpp"
#include "tdcache/errors.hpp"
#include "tdcache/presets.hpp"
#include "tdcache/ratecost.hpp"

using namespace tdcache;

namespace {

std::shared_ptr<const Rdi> preset(const char* name) {
  return std::make_shared<const Rdi>(preset_rdi(name));
}

struct StaticPoint {
  double t, r, s;
};

// Hit ratio and mean caching time of fixed-t policies from an independent
// numpy evaluation of the canonical components.
const std::map<std::string, std::vector<StaticPoint>>& static_table() {
  static const std::map<std::string, std::vector<StaticPoint>> table = {
      {"p1", {{0.5, 0.393469340287367, 0.393469340287367}, {1.0, 0.632120558828558, 0.632120558828558},
              {2.0, 0.864664716763387, 0.864664716763387}, {5.0, 0.993262053000915, 0.993262053000915}}},
      {"p2", {{0.5, 0.5, 0.375}, {1.0, 1, 0.5}, {2.0, 1, 0.5}, {5.0, 1, 0.5}}},
      {"p3", {{0.5, 0.125, 0.479166666666667}, {1.0, 0.5, 0.833333333333333}, {2.0, 1, 1}, {5.0, 1, 1}}},
      {"p4", {{0.5, 0, 0.5}, {1.0, 0, 1}, {2.0, 0.5, 1.69314718055995}, {5.0, 0.8, 2.6094379124341}}},
      {"p5", {{0.5, 0.333333333333333, 0.391002218955771}, {1.0, 0.5, 0.681690113816209}, {2.0, 1, 1},
              {5.0, 1, 1}}},
      {"p6", {{0.5, 0.23608160417242, 0.43608160417242}, {1.0, 0.379272335297135, 0.779272335297134},
              {2.0, 0.518798830058032, 1.31879883005803}, {5.0, 0.595957231800549, 2.59595723180055}}},
      {"p7", {{0.5, 0.25, 0.4375}, {1.0, 0.5, 0.75}, {2.0, 1, 1}, {5.0, 1, 1}}},
      {"p8", {{0.5, 0, 0.5}, {1.0, 0, 1}, {2.0, 0.5, 1.83333333333333}, {5.0, 1, 2}}},
      {"p9", {{0.5, 0, 0.5}, {1.0, 0, 1}, {2.0, 0.2, 1.87725887222398}, {5.0, 0.32, 4.04377516497364}}},
      {"p10", {{0.5, 0.266666666666667, 0.412801775164617}, {1.0, 0.6, 0.745352091052967}, {2.0, 1, 1},
               {5.0, 1, 1}}}};
  return table;
}

}  // namespace

TEST(StaticPolicy, MatchesFrozenOracle) {
  for (const auto& [name, points] : static_table()) {
    const Rdi rdi(preset_rdi(name));
    for (const auto& p : points) {
      EXPECT_NEAR(hit_ratio(rdi, p.t), p.r, 1e-12) << name << " t=" << p.t;
      EXPECT_NEAR(mean_caching_time(rdi, p.t), p.s, 1e-12) << name << " t=" << p.t;
    }
  }
}

TEST(StaticPolicy, MeanCachingTimeIsIntegratedSurvival) {
  // E[min(X, t)] with never-requested items held for t.
  for (const char* name : {"p1", "p3", "p5", "p6", "p7"}) {
    const Rdi rdi(preset_rdi(name));
    for (double t : {0.3, 0.9, 1.7}) {
      const double ref = oracle::simpson([&](double x) { return 1.0 - rdi.cdf(x) + rdi.undemand_prob(); }, 0.0, t);
      EXPECT_NEAR(mean_caching_time(rdi, t), ref, 1e-9) << name << " t=" << t;
    }
  }
}

TEST(StaticPolicy, NeverAndForever) {
  const Rdi p6(preset_rdi("p6"));
  EXPECT_EQ(hit_ratio(p6, CachePolicy::never()), 0.0);
  EXPECT_EQ(mean_caching_time(p6, CachePolicy::never()), 0.0);
  EXPECT_NEAR(hit_ratio(p6, CachePolicy::until_requested()), 0.6, 1e-14);
  // Never-requested items stay forever.
  EXPECT_TRUE(std::isinf(mean_caching_time(p6, CachePolicy::until_requested())));
  EXPECT_NEAR(mean_caching_time(Rdi(preset_rdi("p3")), kInf), 1.0, 1e-14);
}

TEST(StaticPolicy, RandomizedPolicyAveragesAtoms) {
  const Rdi p3(preset_rdi("p3"));
  CachePolicy mix{{{0.25, 0.5}, {0.5, 1.0}, {0.25, std::nullopt}}};
  EXPECT_NEAR(hit_ratio(p3, mix), 0.25 * 0.125 + 0.5 * 0.5, 1e-14);
  EXPECT_NEAR(mean_caching_time(p3, mix), 0.25 * 0.479166666666667 + 0.5 * 0.833333333333333, 1e-12);
}

TEST(RateCost, InvertsStaticPolicy) {
  for (const char* name : {"p1", "p2", "p3", "p5", "p6", "p7", "p10"}) {
    const Rdi rdi(preset_rdi(name));
    for (const auto& p : static_table().at(name)) {
      if (p.r <= 0.0 || p.r >= 1.0 - rdi.undemand_prob() - 1e-12) continue;
      EXPECT_NEAR(rate_cost(rdi, p.r), p.s, 1e-9) << name << " r=" << p.r;
    }
  }
}

TEST(RateCost, ClosedFormsAgreeWithGenericRoute) {
  struct Case {
    Family f;
    std::vector<double> p;
  };
  const Case cases[] = {{Family::exponential, {0.7}},       {Family::uniform, {0.2, 1.4}},
                        {Family::triangular, {0.0, 3.0, 2.0}}, {Family::pareto, {1.5, 0.4}},
                        {Family::arcsine, {3.0}}};
  for (const auto& c : cases) {
    FamilySpec spec{c.f, c.p};
    const Rdi rdi(RdiSpec{spec, {}});
    for (int k = 1; k < 60; ++k) {
      const double r = k / 60.0;
      EXPECT_NEAR(rate_cost(rdi, r), rate_cost_closed_form(c.f, c.p, r), 1e-10) << family_name(c.f) << " r=" << r;
    }
  }
}

TEST(RateCost, ExponentialIsLinear) {
  for (double rate : {0.5, 1.0, 4.0}) {
    const Rdi rdi(exponential(rate));
    for (int k = 1; k < 20; ++k) EXPECT_NEAR(rate_cost(rdi, k / 20.0), k / 20.0 / rate, 1e-12);
    EXPECT_NEAR(static_marginal_cost(rdi, 0.3), 1.0 / rate, 1e-9);
    const auto curve = RateCostCurve::build(std::make_shared<const Rdi>(exponential(rate)));
    EXPECT_EQ(curve.classification(), CurveClass::linear_alpha);
    EXPECT_NEAR(curve.alpha(), 1.0 / rate, 1e-9);
  }
}

TEST(RateCost, OutOfRangeTargets) {
  const Rdi p6(preset_rdi("p6"));
  EXPECT_THROW(rate_cost(p6, -0.1), DomainError);
  EXPECT_THROW(rate_cost(p6, 0.7), InfeasibleError);
}

TEST(RateCost, CurvatureMatchesDifference) {
  const Rdi p3(preset_rdi("p3"));
  for (double r : {0.2, 0.35, 0.7}) {
    const double h = 1e-4;
    const double fd = (static_marginal_cost(p3, r + h) - static_marginal_cost(p3, r - h)) / (2 * h);
    EXPECT_NEAR(curvature(p3, r), fd, 1e-4 * std::max(1.0, std::abs(fd))) << r;
  }
}

TEST(Hull, LowerHullOfHandmadePoints) {
  const std::vector<CurvePoint> pts = {{0, 0}, {0.25, 0.5}, {0.5, 0.4}, {0.75, 0.5}, {1.0, 1.2}};
  const auto hull = lower_convex_hull(pts);
  // (0.5, 0.4) lies above the chord from the origin to (0.75, 0.5).
  ASSERT_EQ(hull.size(), 3u);
  EXPECT_EQ(hull[1].r, 0.75);
  EXPECT_EQ(hull[2].r, 1.0);
  // Collinear interior points are merged.
  const std::vector<CurvePoint> line = {{0, 0}, {0.5, 0.5}, {1, 1}};
  EXPECT_EQ(lower_convex_hull(line).size(), 2u);
}

class EnvelopeProperties : public ::testing::TestWithParam<std::string> {};

TEST_P(EnvelopeProperties, ConvexMinorantOfStaticCurve) {
  const auto curve = RateCostCurve::build(preset(GetParam().c_str()));
  const double top = curve.asymptotic() ? curve.r_max() : curve.r_sup();
  EXPECT_NEAR(curve.envelope(0.0), 0.0, 1e-12);
  double prev_slope = -kInf;
  const int n = 300;
  for (int k = 1; k < n; ++k) {
    const double r = top * k / n;
    const double env = curve.envelope(r);
    EXPECT_LE(env, curve.static_cost(r) + 1e-8) << "r=" << r;
    const double slope = curve.envelope_slope(r);
    EXPECT_GE(slope, prev_slope - 1e-6 * std::max(1.0, std::abs(prev_slope))) << "r=" << r;
    prev_slope = slope;
  }
  // Midpoint convexity on random-ish pairs.
  for (int k = 1; k < 50; ++k) {
    const double a = top * ((k * 37) % 100) / 100.0, b = top * ((k * 61) % 100) / 100.0;
    EXPECT_LE(curve.envelope(0.5 * (a + b)), 0.5 * (curve.envelope(a) + curve.envelope(b)) + 1e-8);
  }
}

TEST_P(EnvelopeProperties, PolicyRealizesEnvelope) {
  const auto curve = RateCostCurve::build(preset(GetParam().c_str()));
  const double top = curve.asymptotic() ? curve.r_max() : curve.r_sup();
  for (double f : {0.1, 0.37, 0.62, 0.9}) {
    const double r = f * top;
    const CachePolicy pol = curve.policy_for_target(r);
    EXPECT_NO_THROW(pol.validate());
    EXPECT_NEAR(hit_ratio(curve.rdi(), pol), r, 1e-8) << "r=" << r;
    EXPECT_NEAR(mean_caching_time(curve.rdi(), pol), curve.envelope(r), 1e-6 * std::max(1.0, curve.envelope(r)))
        << "r=" << r;
  }
}

TEST_P(EnvelopeProperties, FillAtPriceIsMonotone) {
  const auto curve = RateCostCurve::build(preset(GetParam().c_str()));
  double prev = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double beta = 0.01 * std::pow(1.05, k);
    const double r = curve.max_fill_at_price(beta);
    EXPECT_GE(r, prev - 1e-12) << "beta=" << beta;
    EXPECT_LE(r, curve.r_sup() + 1e-12);
    prev = r;
  }
}

INSTANTIATE_TEST_SUITE_P(Presets, EnvelopeProperties,
                         ::testing::Values("p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8", "p9", "p10"));

TEST(Envelope, UniformIsASingleChord) {
  // s(r) = r - r^2/2 is concave, so the envelope is the chord to (1, 1/2).
  const auto curve = RateCostCurve::build(preset("p2"));
  EXPECT_EQ(curve.classification(), CurveClass::linear_alpha);
  EXPECT_NEAR(curve.alpha(), 0.5, 1e-9);
  EXPECT_NEAR(curve.envelope(0.5), 0.25, 1e-9);
  EXPECT_NEAR(curve.static_cost(0.5), 0.375, 1e-12);
}

TEST(Envelope, HeavyTailDiverges) {
  const auto curve = RateCostCurve::build(preset("p4"));
  EXPECT_TRUE(curve.asymptotic());
  EXPECT_LT(curve.r_max(), curve.r_sup());
  EXPECT_NEAR(curve.r_sup(), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(curve.s_sup()));
}
