#include <gtest/gtest.h>

#include <cmath>

#include "tdcache/allocator.hpp"
#include "tdcache/blocking.hpp"
#include "tdcache/controller.hpp"
#include "tdcache/finite_opt.hpp"
#include "tdcache/presets.hpp"

using namespace tdcache;

namespace {

// Noise-free environment: Little's law for storage, Erlang-B insensitivity for throughput.
class AnalyticEnvironment final : public ControllerEnvironment {
 public:
  AnalyticEnvironment(const Flow& flow, std::optional<double> buffer) : flow_(flow), buffer_(buffer) {}
  std::size_t num_classes() const override { return flow_.size(); }
  EpochMeasurement run_epoch(std::span<const CachePolicy> policies, std::size_t window) override {
    ++epochs;
    const PolicyStats st = policy_stats(flow_, policies);
    const double lambda = flow_.spec().arrival_rate, bits = flow_.spec().bits_per_item;
    const double b = buffer_ ? erlang_b(*buffer_, lambda * st.mean_caching_time) : 0.0;
    EpochMeasurement m;
    m.storage = lambda * bits * st.mean_caching_time * (1 - b);
    m.storage_stderr = 1e-9;
    m.throughput = lambda * bits * st.hit_ratio * (1 - b);
    m.throughput_stderr = 1e-9;
    m.arrivals = window;
    return m;
  }
  int epochs = 0;

 private:
  const Flow& flow_;
  std::optional<double> buffer_;
};

const Flow& pi2() {
  static const Flow f(preset_flow("pi2"));
  return f;
}

}  // namespace

TEST(PriceResponse, FillIsMonotoneAndBounded) {
  const Flow f(preset_flow("pi1"));
  for (const auto& curve : f.curves()) {
    double prev = 0.0;
    for (int k = 0; k <= 300; ++k) {
      const double beta = 1e-3 * std::pow(1.05, k);
      const double r = fill_at_price(*curve, beta, 0.1);
      EXPECT_GE(r, prev - 1e-12);
      EXPECT_LE(r, curve->r_sup() + 1e-12);
      prev = r;
    }
    EXPECT_EQ(fill_at_price(*curve, 0.0, 0.1), 0.0);
  }
}

TEST(PriceResponse, ChordFillsAcrossTheBand) {
  // Exponential class: one chord of slope 1, filled linearly for beta in [0.95, 1.05].
  const auto c = RateCostCurve::build(std::make_shared<const Rdi>(exponential(1.0)));
  EXPECT_EQ(fill_at_price(c, 0.94, 0.1), 0.0);
  EXPECT_NEAR(fill_at_price(c, 1.0, 0.1), 0.5 * c.r_max(), 1e-9);
  EXPECT_NEAR(fill_at_price(c, 1.06, 0.1), c.r_max(), 1e-9);
}

TEST(PriceResponse, PoliciesPerClass) {
  const auto pols = beta_to_policy(pi2().curves(), 0.8);
  ASSERT_EQ(pols.size(), pi2().size());
  for (const auto& p : pols) EXPECT_NO_THROW(p.validate());
}

TEST(InfiniteController, ReachesStorageTarget) {
  AnalyticEnvironment env(pi2(), std::nullopt);
  const ControllerState st = run_infinite(6000, pi2().curves(), env);
  EXPECT_TRUE(st.converged) << st.diagnostic;
  EXPECT_NEAR(st.measured, 6000, 0.02 * 6000);
  EXPECT_EQ(st.history.size(), st.epochs);
  EXPECT_LE(st.epochs, 50u);
}

TEST(InfiniteController, UnreachableTargetStopsAtEpochLimit) {
  // pi2 cannot hold more than lambda * B * s_sup = 11000 bits.
  AnalyticEnvironment env(pi2(), std::nullopt);
  ControllerOptions opt;
  opt.max_epochs = 30;
  const ControllerState st = run_infinite(20000, pi2().curves(), env, opt);
  EXPECT_FALSE(st.converged);
  EXPECT_EQ(st.epochs, 30u);
  EXPECT_FALSE(st.diagnostic.empty());
}

TEST(InfiniteController, PriceStaysPositive) {
  // A target far below the first measurement drives the raw update negative.
  AnalyticEnvironment env(pi2(), std::nullopt);
  const ControllerState st = run_infinite(500, pi2().curves(), env);
  ASSERT_GE(st.history.size(), 2u);
  EXPECT_LT(st.history[1].beta, st.history[0].beta);
  for (const auto& h : st.history) EXPECT_GT(h.beta, 0.0);
}

TEST(FiniteController, ApproachesModelOptimum) {
  const OverallCurve oc = OverallCurve::build(pi2());
  const FiniteOptResult best = optimize(pi2(), oc, 10, 10, 1.0);
  AnalyticEnvironment env(pi2(), 10.0);
  const ControllerState st = run_finite(pi2().curves(), env);
  EXPECT_TRUE(st.converged) << st.diagnostic;
  EXPECT_GE(st.k_star, 0);
  EXPECT_NEAR(st.measured, best.R_star, 0.02 * best.R_star);
  EXPECT_LE(st.measured, best.R_star * (1 + 1e-9));
}

TEST(FiniteController, SimulatedEnvironmentRuns) {
  const std::vector<CachePolicy> idle(pi2().size(), CachePolicy::never());
  SimulatedEnvironment env(sim_classes(pi2(), idle), ArrivalProcess::poisson(10), std::size_t{10}, 3);
  const auto pols = beta_to_policy(pi2().curves(), 1.0);
  const EpochMeasurement m = env.run_epoch(pols, 20000);
  EXPECT_EQ(m.arrivals, 20000u);
  EXPECT_GT(m.throughput, 0.0);
  EXPECT_GT(m.storage, 0.0);
  EXPECT_LE(m.storage, 10 * 1000.0);
}
