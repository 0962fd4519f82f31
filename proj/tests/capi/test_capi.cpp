#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <thread>

#include <json.hpp>

#include "tdcache/tdcache.h"

using Json = nlohmann::json;

namespace {

std::string take(tdc_text* t) {
  std::string s(tdc_text_data(t), tdc_text_size(t));
  tdc_text_free(t);
  return s;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STRNE(tdc_version(), "");
  EXPECT_STREQ(tdc_status_name(TDC_OK), "ok");
  EXPECT_STREQ(tdc_status_name(TDC_CONFIG_ERROR), "config_error");
}

TEST(CApi, RdiQueries) {
  tdc_rdi* r = nullptr;
  ASSERT_EQ(tdc_rdi_preset("p6", &r), TDC_OK);
  double q, nu, lo, hi;
  ASSERT_EQ(tdc_rdi_moments(r, &q, &nu, &lo, &hi), TDC_OK);
  EXPECT_NEAR(q, 0.4, 1e-12);
  EXPECT_NEAR(nu, 0.6, 1e-10);
  EXPECT_TRUE(std::isinf(hi));
  double v;
  ASSERT_EQ(tdc_hit_ratio(r, 1.0, &v), TDC_OK);
  EXPECT_NEAR(v, 0.379272335297135, 1e-12);
  ASSERT_EQ(tdc_mean_caching_time(r, 1.0, &v), TDC_OK);
  EXPECT_NEAR(v, 0.779272335297134, 1e-12);
  EXPECT_EQ(tdc_rate_cost(r, 0.7, &v), TDC_INFEASIBLE);
  EXPECT_STRNE(tdc_last_error(), "");
  tdc_rdi_free(r);
}

TEST(CApi, ErrorsAndNullHandling) {
  tdc_rdi* r = nullptr;
  EXPECT_EQ(tdc_rdi_from_json("{bad", &r), TDC_CONFIG_ERROR);
  EXPECT_EQ(r, nullptr);
  EXPECT_EQ(tdc_rdi_preset("nope", &r), TDC_CONFIG_ERROR);
  EXPECT_EQ(tdc_rdi_from_json(R"({"family":"uniform","params":[1,0]})", &r), TDC_INVALID_ARGUMENT);
  double v;
  EXPECT_EQ(tdc_rdi_cdf(nullptr, 1.0, &v), TDC_INVALID_ARGUMENT);
  EXPECT_EQ(tdc_erlang_b(-1, 1, &v), TDC_DOMAIN_ERROR);
  EXPECT_EQ(tdc_erlang_b(1, 1, nullptr), TDC_INVALID_ARGUMENT);
  tdc_rdi_free(nullptr);
  tdc_text_free(nullptr);
  tdc_flow_free(nullptr);
}

TEST(CApi, LastErrorIsPerThread) {
  double v;
  EXPECT_EQ(tdc_erlang_b(-1, 1, &v), TDC_DOMAIN_ERROR);
  const std::string here = tdc_last_error();
  std::string there = "unset";
  std::thread([&] { there = tdc_last_error(); }).join();
  EXPECT_FALSE(here.empty());
  EXPECT_TRUE(there.empty());
}

TEST(CApi, CurveAndFlow) {
  tdc_rdi* r = nullptr;
  ASSERT_EQ(tdc_rdi_from_json("\"p2\"", &r), TDC_OK);
  tdc_curve* c = nullptr;
  ASSERT_EQ(tdc_curve_build(r, 0, &c), TDC_OK);
  double s;
  ASSERT_EQ(tdc_curve_envelope(c, 0.5, &s), TDC_OK);
  EXPECT_NEAR(s, 0.25, 1e-9);
  tdc_text* t = nullptr;
  ASSERT_EQ(tdc_curve_csv(c, 11, &t), TDC_OK);
  const std::string csv = take(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,s_static,s_envelope,classification");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);
  ASSERT_EQ(tdc_curve_summary_json(c, &t), TDC_OK);
  EXPECT_EQ(Json::parse(take(t)).at("classification"), "linear_alpha");
  tdc_curve_free(c);
  tdc_rdi_free(r);

  tdc_flow* f = nullptr;
  ASSERT_EQ(tdc_flow_from_json("\"pi3\"", &f), TDC_OK);
  double sup;
  ASSERT_EQ(tdc_flow_feasible_sup(f, &sup), TDC_OK);
  EXPECT_NEAR(sup, 0.8, 1e-12);
  ASSERT_EQ(tdc_allocate_json(f, 0.7, 0, &t), TDC_OK);
  EXPECT_NEAR(Json::parse(take(t)).at("cost").get<double>(), 1.043341, 2e-5);
  EXPECT_EQ(tdc_allocate_json(f, 0.9, 0, &t), TDC_INFEASIBLE);
  tdc_overall* o = nullptr;
  ASSERT_EQ(tdc_overall_build(f, &o), TDC_OK);
  double r08;
  ASSERT_EQ(tdc_overall_r_breve(o, 0.8, &r08), TDC_OK);
  EXPECT_NEAR(r08, 0.603781, 2e-5);
  ASSERT_EQ(tdc_overall_csv(o, 5, &t), TDC_OK);
  EXPECT_EQ(take(t).substr(0, 9), "s,r_breve");
  tdc_overall_free(o);
  tdc_flow_free(f);
}

TEST(CApi, FiniteBufferAndQc) {
  tdc_flow* f = nullptr;
  ASSERT_EQ(tdc_flow_from_json("\"pi2\"", &f), TDC_OK);
  tdc_overall* o = nullptr;
  ASSERT_EQ(tdc_overall_build(f, &o), TDC_OK);
  tdc_text* t = nullptr;
  ASSERT_EQ(tdc_optimize_json(f, o, 10, 10, 1, &t), TDC_OK);
  const Json j = Json::parse(take(t));
  EXPECT_NEAR(j.at("r_star").get<double>(), 0.748868, 2e-6);
  EXPECT_NEAR(j.at("L_threshold").get<double>(), 81.2796, 1e-3);
  tdc_overall_free(o);
  tdc_flow_free(f);

  ASSERT_EQ(tdc_qc_discriminant(10, 3, &t), TDC_OK);
  EXPECT_EQ(take(t), "1/340200");
  EXPECT_EQ(tdc_qc_discriminant(5, 1, &t), TDC_DOMAIN_ERROR);
  ASSERT_EQ(tdc_qc_verify_json(40, 1, &t), TDC_OK);
  EXPECT_TRUE(Json::parse(take(t)).at("all_nonnegative").get<bool>());
}

TEST(CApi, SimulationIsDeterministic) {
  const char* cfg = R"({"flow": "pi2", "target": 0.6, "buffer": 10, "n_arrivals": 20000, "seed": 4})";
  tdc_text* a = nullptr;
  tdc_text* b = nullptr;
  ASSERT_EQ(tdc_simulate_json(cfg, 1, 1, 0, &a), TDC_OK);
  ASSERT_EQ(tdc_simulate_json(cfg, 1, 1, 0, &b), TDC_OK);
  EXPECT_EQ(take(a), take(b));
  EXPECT_EQ(tdc_simulate_json(R"({"flow": "pi2"})", 1, 1, 0, &a), TDC_CONFIG_ERROR);
}

TEST(CApi, ValidateSubset) {
  int ok = 0;
  tdc_text* t = nullptr;
  ASSERT_EQ(tdc_validate_json(1, 1, 0.0, "A1,A3", &ok, &t), TDC_OK);
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(Json::parse(take(t)).at("criteria").size(), 2u);
  ASSERT_EQ(tdc_validate_json(1, 1, 1e-3, "A3", &ok, &t), TDC_OK);
  EXPECT_EQ(ok, 0);
  tdc_text_free(t);
  EXPECT_EQ(tdc_validate_json(1, 1, 0.0, "A42", &ok, &t), TDC_INVALID_ARGUMENT);
}
