#include <gtest/gtest.h>

#include <cmath>

#include "tdcache/allocator.hpp"
#include "tdcache/blocking.hpp"
#include "tdcache/errors.hpp"
#include "tdcache/presets.hpp"
#include "tdcache/simulator.hpp"

using namespace tdcache;

namespace {

SimConfig single_class(const RdiSpec& rdi, CachePolicy policy, double rate, std::size_t n) {
  SimConfig c;
  c.classes = {{1.0, std::make_shared<const Rdi>(rdi), std::move(policy)}};
  c.arrivals = ArrivalProcess::poisson(rate);
  c.n_arrivals = n;
  return c;
}

void expect_within(const Estimate& e, double truth, double sigmas, const char* what) {
  EXPECT_NEAR(e.mean, truth, sigmas * e.stderr_ + 1e-12) << what << " stderr=" << e.stderr_;
}

}  // namespace

TEST(Arrivals, NominalMoments) {
  EXPECT_EQ(ArrivalProcess::poisson(3).nominal_c2(), 1.0);
  EXPECT_EQ(ArrivalProcess::deterministic(3).nominal_c2(), 0.0);
  EXPECT_NEAR(ArrivalProcess::bursty(3).nominal_c2(), 2.0, 1e-12);
  EXPECT_NEAR(ArrivalProcess::bursty(3).mean_rate(), 3.0, 1e-12);
  EXPECT_THROW(ArrivalProcess::poisson(0).validate(), InvalidSpec);
  EXPECT_THROW(ArrivalProcess::hyperexponential(0.5, 1, 0.4, 2).validate(), InvalidSpec);
}

TEST(Arrivals, EmpiricalVariability) {
  for (const auto& a : {ArrivalProcess::poisson(10), ArrivalProcess::deterministic(10), ArrivalProcess::bursty(10)}) {
    Rng rng(11);
    std::vector<double> gaps(200000);
    for (auto& g : gaps) g = a.next_gap(rng);
    EXPECT_NEAR(empirical_c2(gaps), a.nominal_c2(), 0.05) << a.name();
  }
  std::vector<double> few(100, 1.0);
  EXPECT_THROW(empirical_c2(few), DomainError);
}

TEST(Simulate, InfiniteBufferMatchesStaticPolicy) {
  const SimConfig c = single_class(exponential(1.0), CachePolicy::fixed(1.0), 10, 200000);
  const SimReport r = run(c);
  const double truth = 1 - std::exp(-1.0);
  expect_within(r.hit_ratio, truth, 4, "hit");
  expect_within(r.caching_time, truth, 4, "W");
  EXPECT_EQ(r.blocking.mean, 0.0);
  EXPECT_FALSE(r.censored);
  EXPECT_EQ(r.measured_arrivals, 180000u);
}

TEST(Simulate, InclusiveHitAtTheDeadline) {
  // Every request lands exactly at t = 1; a deadline of 1 still hits.
  const SimConfig c = single_class(point_mass(1.0), CachePolicy::fixed(1.0), 10, 20000);
  const SimReport r = run(c);
  EXPECT_EQ(r.hit_ratio.mean, 1.0);
  EXPECT_NEAR(r.caching_time.mean, 1.0, 1e-12);
}

TEST(Simulate, BlockingMatchesErlangB) {
  const SimConfig base = single_class(exponential(1.0), CachePolicy::until_requested(), 10, 300000);
  SimConfig c = base;
  c.buffer = 10;
  const SimReport r = run(c);
  expect_within(r.blocking, erlang_b(10, 10), 4, "blocking");
  // Blocked items are admitted nowhere, so hits scale by 1 - B.
  expect_within(r.hit_ratio, 1 - erlang_b(10, 10), 4, "hit");
}

TEST(Simulate, LittlesLawCloses) {
  SimConfig c = single_class(preset_rdi("p3"), CachePolicy::fixed(1.5), 10, 300000);
  c.buffer = 12;
  const SimReport r = run(c);
  const double predicted = r.measured_rate * (1 - r.blocking.mean) * r.caching_time.mean;
  EXPECT_NEAR(r.occupancy.mean, predicted, 0.01 * predicted);
  EXPECT_NEAR(r.throughput.mean, r.measured_rate * 1000 * r.hit_ratio.mean, 0.01 * r.throughput.mean);
}

TEST(Simulate, SkipPolicyAdmitsNothing) {
  const SimConfig c = single_class(exponential(1.0), CachePolicy::never(), 10, 20000);
  const SimReport r = run(c);
  EXPECT_EQ(r.hit_ratio.mean, 0.0);
  EXPECT_EQ(r.occupancy.mean, 0.0);
  EXPECT_EQ(r.blocking.mean, 0.0);
}

TEST(Simulate, NeverRequestedItemsCensorTheRun) {
  const SimConfig c = single_class(preset_rdi("p6"), CachePolicy::until_requested(), 10, 20000);
  EXPECT_TRUE(run(c).censored);
}

TEST(Simulate, DeterministicGivenSeed) {
  SimConfig c = single_class(preset_rdi("p5"), CachePolicy::fixed(0.8), 10, 50000);
  c.buffer = 5;
  const SimReport a = run(c), b = run(c);
  EXPECT_EQ(a.hit_ratio.mean, b.hit_ratio.mean);
  EXPECT_EQ(a.occupancy.mean, b.occupancy.mean);
  c.seed = 2;
  EXPECT_NE(run(c).hit_ratio.mean, a.hit_ratio.mean);
}

TEST(Simulate, ReplicationsShrinkTheError) {
  SimConfig c = single_class(preset_rdi("p3"), CachePolicy::fixed(1.0), 10, 50000);
  const SimReport one = run(c);
  const SimReport four = run_replications(c, 4, 2);
  EXPECT_LT(four.hit_ratio.stderr_, one.hit_ratio.stderr_);
  expect_within(four.hit_ratio, 0.5, 4, "hit");
}

TEST(Simulate, ConfigValidation) {
  SimConfig c = single_class(exponential(1.0), CachePolicy::fixed(1.0), 10, 1000);
  EXPECT_THROW(run(c), InvalidSpec);
  c.n_arrivals = 20000;
  c.batches = 5;
  EXPECT_THROW(run(c), InvalidSpec);
  c.batches = 32;
  c.warmup_fraction = 0.7;
  EXPECT_THROW(run(c), InvalidSpec);
}

TEST(Ecdf, RequiresRecording) {
  const SimReport r = run(single_class(exponential(1.0), CachePolicy::fixed(1.0), 10, 20000));
  EXPECT_THROW(caching_time_ecdf(r), PreconditionError);
}

TEST(Ecdf, MatchesCachingTimeLaw) {
  const Flow f(preset_flow("pi1"));
  const Allocation a = allocate(f, 0.5);
  std::vector<CachePolicy> pols;
  for (const auto& c : a.classes) pols.push_back(c.policy);
  SimConfig c;
  c.classes = sim_classes(f, pols);
  c.arrivals = ArrivalProcess::poisson(10);
  c.n_arrivals = 100000;
  c.record_caching_times = true;
  const SimReport r = run(c);
  const Ecdf e = caching_time_ecdf(r);
  EXPECT_GT(e.size(), 80000u);
  const CachingTimeLaw law(f, pols);
  const double d = ks_distance(e.sorted(), [&](double x) { return law.cdf(x); });
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(e.size())));  // 1% KS critical value
}

TEST(Ks, DistanceOfKnownSample) {
  std::vector<double> s = {0.1, 0.2, 0.3, 0.4};
  EXPECT_NEAR(ks_distance(s, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.6, 1e-12);
}
