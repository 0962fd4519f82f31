#include <gtest/gtest.h>

#include <cmath>

#include "tdcache/acceptance.hpp"
#include "tdcache/errors.hpp"
#include "tdcache/experiments.hpp"
#include "tdcache/policy.hpp"
#include "tdcache/presets.hpp"

using namespace tdcache;

TEST(Policy, Validation) {
  EXPECT_NO_THROW(CachePolicy::never().validate());
  EXPECT_NO_THROW(CachePolicy::fixed(2.0).validate());
  EXPECT_NO_THROW(CachePolicy::until_requested().validate());
  EXPECT_THROW((CachePolicy{{{0.5, 1.0}, {0.4, 2.0}}}).validate(), InvalidSpec);
  EXPECT_THROW((CachePolicy{{{1.0, -1.0}}}).validate(), InvalidSpec);
  EXPECT_THROW((CachePolicy{{{0.5, 1.0}, {0.5, 1.0}}}).validate(), InvalidSpec);
  EXPECT_THROW((CachePolicy{{{0.5, std::nullopt}, {0.5, std::nullopt}}}).validate(), InvalidSpec);
  EXPECT_THROW(CachePolicy{}.validate(), InvalidSpec);
}

TEST(Policy, NormalizeMergesAndDrops) {
  const CachePolicy p{{{0.25, 1.0}, {0.0, 3.0}, {0.25, 1.0}, {0.5, 2.0}}};
  const CachePolicy n = p.normalized();
  ASSERT_EQ(n.atoms.size(), 2u);
  EXPECT_NO_THROW(n.validate());
  double w1 = 0.0;
  for (const auto& a : n.atoms)
    if (*a.max_time == 1.0) w1 = a.weight;
  EXPECT_DOUBLE_EQ(w1, 0.5);
  EXPECT_FALSE(p.describe().empty());
}

TEST(Presets, Names) {
  EXPECT_EQ(preset_rdi_names().size(), 10u);
  EXPECT_EQ(preset_flow_names().size(), 3u);
  EXPECT_TRUE(is_preset_rdi("p7"));
  EXPECT_FALSE(is_preset_rdi("p0"));
  EXPECT_TRUE(is_preset_flow("pi3"));
  EXPECT_FALSE(is_preset_flow("pi4"));
  EXPECT_THROW(preset_rdi("q1"), ConfigError);
  EXPECT_THROW(preset_flow("pi0"), ConfigError);
}

TEST(Presets, FlowWeights) {
  const FlowSpec pi2 = preset_flow("pi2", 20.0, 500.0, 2.0);
  EXPECT_EQ(pi2.arrival_rate, 20.0);
  EXPECT_EQ(pi2.bits_per_item, 500.0);
  EXPECT_EQ(pi2.c2, 2.0);
  std::vector<std::string> labels;
  for (const auto& c : pi2.classes) {
    labels.push_back(c.label);
    EXPECT_NEAR(c.weight, 0.2, 1e-15);
  }
  EXPECT_EQ(labels, (std::vector<std::string>{"p1", "p2", "p3", "p7", "p8"}));
}

TEST(Reproduce, PresetsAndHeaders) {
  EXPECT_EQ(reproduce_presets().size(), 6u);
  EXPECT_FALSE(is_reproduce_preset("fig3"));
  const ReproduceResult r = reproduce("fig5", AcceptanceOptions{}, false);
  ASSERT_EQ(r.files.size(), 1u);
  EXPECT_EQ(r.files[0].name, "fig5_overall_rate_cost.csv");
  const auto nl = r.files[0].content.find('\n');
  ASSERT_NE(nl, std::string::npos);
  EXPECT_EQ(r.files[0].content.substr(0, nl).find(';'), std::string::npos);
  EXPECT_TRUE(r.verdicts.empty());
}

// Harness sensitivity: a small Erlang-B perturbation must flip the Erlang-B check.
TEST(Acceptance, PerturbedErlangBFails) {
  AcceptanceOptions opt;
  EXPECT_TRUE(check_criterion("A3", opt).passed);
  opt.erlang_perturbation = 1e-3;
  EXPECT_FALSE(check_criterion("A3", opt).passed);
}

TEST(Acceptance, UnknownCriterion) {
  EXPECT_THROW(check_criterion("A99", AcceptanceOptions{}), std::invalid_argument);
  EXPECT_EQ(criterion_ids().size(), 14u);
}
