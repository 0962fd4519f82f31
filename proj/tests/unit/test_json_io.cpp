#include <gtest/gtest.h>

#include <clocale>
#include <cmath>

#include "tdcache/errors.hpp"
#include "tdcache/format.hpp"
#include "tdcache/json_io.hpp"
#include "tdcache/presets.hpp"

using namespace tdcache;

namespace {

void expect_same_cdf(const RdiSpec& a, const RdiSpec& b) {
  const Rdi ra(a), rb(b);
  for (int k = -2; k <= 60; ++k) EXPECT_EQ(ra.cdf(0.1 * k), rb.cdf(0.1 * k)) << 0.1 * k;
}

}  // namespace

TEST(RdiJson, PresetAndObjectForms) {
  expect_same_cdf(rdi_from_json("p10"), preset_rdi("p10"));
  const Json j = Json::parse(R"({"family": "uniform", "params": [0, 1],
                                 "transforms": [{"op": "time_scale", "xi": 0.5}]})");
  expect_same_cdf(rdi_from_json(j), preset_rdi("p7"));
  expect_same_cdf(rdi_from_json(Json::parse(R"({"point_mass": 1.5})")), point_mass(1.5));
}

TEST(RdiJson, RoundTrip) {
  for (const auto& name : preset_rdi_names()) {
    const RdiSpec spec = preset_rdi(name);
    expect_same_cdf(rdi_from_json(rdi_to_json(spec)), spec);
  }
  const RdiSpec mix = mixture({0.3, 0.7}, {exponential(2), triangular(0, 2, 1).then(time_shift(0.5))});
  expect_same_cdf(rdi_from_json(rdi_to_json(mix)), mix);
}

TEST(RdiJson, Errors) {
  EXPECT_THROW(rdi_from_json("p11"), ConfigError);
  EXPECT_THROW(rdi_from_json(Json::parse(R"({"family": "gamma", "params": [1]})")), ConfigError);
  EXPECT_THROW(rdi_from_json(Json::parse(R"({"params": [0, 1]})")), ConfigError);
  // Well-formed JSON with unusable values is a spec error.
  EXPECT_THROW(rdi_from_json(Json::parse(R"({"family": "uniform", "params": [0]})")), InvalidSpec);
  EXPECT_THROW(rdi_from_json(Json::parse(R"({"family": "uniform", "params": [0, 1],
                                             "transforms": [{"op": "twist", "xi": 1}]})")),
               ConfigError);
  EXPECT_THROW(rdi_from_json(Json(3)), ConfigError);
}

TEST(FlowJson, PresetsAndOverrides) {
  const FlowSpec a = flow_from_json("pi2");
  EXPECT_EQ(a.classes.size(), 5u);
  EXPECT_EQ(a.arrival_rate, 10.0);
  const FlowSpec b = flow_from_json(Json::parse(R"({"preset": "pi3", "arrival_rate": 25, "bits_per_item": 8000})"));
  EXPECT_EQ(b.arrival_rate, 25.0);
  EXPECT_EQ(b.bits_per_item, 8000.0);
  const FlowSpec c = flow_from_json(Json::parse(R"({"classes": [{"label": "x", "weight": 0.25, "rdi": "p1"},
                                                                {"label": "y", "weight": 0.75, "rdi": "p4"}]})"));
  ASSERT_EQ(c.classes.size(), 2u);
  EXPECT_EQ(c.classes[1].label, "y");
  const FlowSpec d = flow_from_json(flow_to_json(c));
  EXPECT_EQ(d.classes[0].weight, 0.25);
  EXPECT_THROW(flow_from_json("pi9"), ConfigError);
}

TEST(PolicyJson, Forms) {
  EXPECT_TRUE(policy_from_json("never").atoms.front().skip());
  EXPECT_TRUE(std::isinf(*policy_from_json("until_requested").atoms.front().max_time));
  EXPECT_TRUE(std::isinf(*policy_from_json("inf").atoms.front().max_time));
  EXPECT_EQ(*policy_from_json(2.5).atoms.front().max_time, 2.5);
  const CachePolicy p = policy_from_json(Json::parse(
      R"({"atoms": [{"weight": 0.5, "max_time": 1}, {"weight": 0.25, "max_time": "inf"}, {"weight": 0.25, "max_time": null}]})"));
  ASSERT_EQ(p.atoms.size(), 3u);
  EXPECT_TRUE(p.atoms[2].skip());
  const CachePolicy q = policy_from_json(policy_to_json(p));
  ASSERT_EQ(q.atoms.size(), 3u);
  EXPECT_TRUE(std::isinf(*q.atoms[1].max_time));
  EXPECT_THROW(policy_from_json(-1.0), ConfigError);
  EXPECT_THROW(policy_from_json(Json::parse(R"({"atoms": [{"weight": 0.5, "max_time": 1}]})")), ConfigError);
}

TEST(SimConfigJson, DefaultsAndTargets) {
  const SimConfig c = sim_config_from_json(Json::parse(R"({"flow": "pi2", "target": 0.6})"));
  EXPECT_EQ(c.classes.size(), 5u);
  EXPECT_EQ(c.arrivals.kind, ArrivalProcess::Kind::poisson);
  EXPECT_EQ(c.arrivals.rate, 10.0);
  EXPECT_FALSE(c.buffer.has_value());
  EXPECT_EQ(c.n_arrivals, 1'000'000u);
  const SimConfig d = sim_config_from_json(Json::parse(
      R"({"flow": "pi1", "policy": 1.0, "buffer": 10, "arrivals": {"kind": "bursty", "rate": 10},
          "n_arrivals": 50000, "seed": 9, "batches": 25})"));
  EXPECT_EQ(*d.buffer, 10u);
  EXPECT_EQ(d.arrivals.kind, ArrivalProcess::Kind::hyperexponential);
  EXPECT_EQ(d.seed, 9u);
  EXPECT_EQ(d.batches, 25u);
  EXPECT_THROW(sim_config_from_json(Json::parse(R"({"flow": "pi1"})")), ConfigError);
  EXPECT_THROW(sim_config_from_json(Json::parse(R"({"flow": "pi1", "policies": [1, 2]})")), ConfigError);
  EXPECT_THROW(parse_json_text("{not json"), ConfigError);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(-1.5e-300), "-1.5e-300");
  EXPECT_EQ(format_number(kInf), "inf");
  EXPECT_EQ(format_number(-kInf), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(1.0 / 3.0, 4), "0.3333");
  for (double x : {0.7462190001, 1e-17, 123456.789, 6.02214076e23}) EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Format, IgnoresProcessLocale) {
  const char* prev = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = prev ? prev : "C";
  bool switched = false;
  for (const char* loc : {"de_DE.UTF-8", "de_DE.utf8", "fr_FR.UTF-8", "ru_RU.UTF-8"})
    if (std::setlocale(LC_NUMERIC, loc)) {
      switched = true;
      break;
    }
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(0.25, 3), "0.25");
  std::setlocale(LC_NUMERIC, saved.c_str());
  if (!switched) GTEST_SKIP() << "no comma-decimal locale installed";
}

TEST(Format, CsvTable) {
  CsvTable t({"a", "b"});
  t.add_row({"1", "x"});
  t.add_row({"2.5", "y"});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.str(), "a,b\n1,x\n2.5,y\n");
  EXPECT_THROW(t.add_row({"only one"}), std::logic_error);
}
