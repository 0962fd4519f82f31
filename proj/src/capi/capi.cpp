#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tdcache/acceptance.hpp"
#include "tdcache/allocator.hpp"
#include "tdcache/blocking.hpp"
#include "tdcache/controller.hpp"
#include "tdcache/errors.hpp"
#include "tdcache/experiments.hpp"
#include "tdcache/finite_opt.hpp"
#include "tdcache/format.hpp"
#include "tdcache/json_io.hpp"
#include "tdcache/presets.hpp"
#include "tdcache/qc.hpp"
#include "tdcache/simulator.hpp"
#include "tdcache/tdcache.h"

using namespace tdcache;

struct tdc_text {
  std::string data;
};
struct tdc_rdi {
  std::shared_ptr<const Rdi> rdi;
};
struct tdc_curve {
  RateCostCurve curve;
};
struct tdc_flow {
  Flow flow;
};
struct tdc_overall {
  OverallCurve curve;
};

namespace {

thread_local std::string g_last_error;

tdc_status fail(tdc_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

template <class F>
tdc_status guard(F&& f) {
  try {
    f();
    return TDC_OK;
  } catch (const InvalidSpec& e) {
    return fail(TDC_INVALID_ARGUMENT, e.what());
  } catch (const DomainError& e) {
    return fail(TDC_DOMAIN_ERROR, e.what());
  } catch (const InfeasibleError& e) {
    return fail(TDC_INFEASIBLE, e.what());
  } catch (const PreconditionError& e) {
    return fail(TDC_PRECONDITION, e.what());
  } catch (const ConfigError& e) {
    return fail(TDC_CONFIG_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(TDC_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(TDC_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(TDC_INTERNAL_ERROR, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) throw std::invalid_argument(std::string(name) + " must not be NULL");
}

tdc_text* text(std::string s) { return new tdc_text{std::move(s)}; }

std::string str(double x) { return format_number(x); }

}  // namespace

extern "C" {

const char* tdc_version(void) { return "0.1.0"; }

const char* tdc_status_name(tdc_status status) {
  switch (status) {
    case TDC_OK: return "ok";
    case TDC_INVALID_ARGUMENT: return "invalid_argument";
    case TDC_DOMAIN_ERROR: return "domain_error";
    case TDC_INFEASIBLE: return "infeasible";
    case TDC_PRECONDITION: return "precondition";
    case TDC_CONFIG_ERROR: return "config_error";
    case TDC_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

const char* tdc_last_error(void) { return g_last_error.c_str(); }

const char* tdc_text_data(const tdc_text* t) { return t ? t->data.c_str() : ""; }
size_t tdc_text_size(const tdc_text* t) { return t ? t->data.size() : 0; }
void tdc_text_free(tdc_text* t) { delete t; }

tdc_status tdc_rdi_from_json(const char* json, tdc_rdi** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new tdc_rdi{std::make_shared<const Rdi>(rdi_from_json(parse_json_text(json)))};
  });
}

tdc_status tdc_rdi_preset(const char* name, tdc_rdi** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    if (!is_preset_rdi(name)) throw ConfigError(std::string("unknown RDI preset '") + name + "'");
    *out = new tdc_rdi{std::make_shared<const Rdi>(preset_rdi(name))};
  });
}

void tdc_rdi_free(tdc_rdi* rdi) { delete rdi; }

tdc_status tdc_rdi_moments(const tdc_rdi* rdi, double* q, double* nu, double* t_inf, double* t_sup) {
  return guard([&] {
    need(rdi, "rdi");
    const Moments& m = rdi->rdi->moments();
    if (q) *q = m.q;
    if (nu) *nu = m.nu;
    if (t_inf) *t_inf = m.t_inf;
    if (t_sup) *t_sup = m.t_sup;
  });
}

tdc_status tdc_rdi_cdf(const tdc_rdi* rdi, double x, double* out) {
  return guard([&] {
    need(rdi, "rdi");
    need(out, "out");
    *out = rdi->rdi->cdf(x);
  });
}

tdc_status tdc_rdi_quantile(const tdc_rdi* rdi, double z, double* out) {
  return guard([&] {
    need(rdi, "rdi");
    need(out, "out");
    *out = rdi->rdi->quantile(z);
  });
}

tdc_status tdc_hit_ratio(const tdc_rdi* rdi, double t, double* out) {
  return guard([&] {
    need(rdi, "rdi");
    need(out, "out");
    *out = hit_ratio(*rdi->rdi, t);
  });
}

tdc_status tdc_mean_caching_time(const tdc_rdi* rdi, double t, double* out) {
  return guard([&] {
    need(rdi, "rdi");
    need(out, "out");
    *out = mean_caching_time(*rdi->rdi, t);
  });
}

tdc_status tdc_rate_cost(const tdc_rdi* rdi, double r, double* out) {
  return guard([&] {
    need(rdi, "rdi");
    need(out, "out");
    *out = rate_cost(*rdi->rdi, r);
  });
}

tdc_status tdc_curve_build(const tdc_rdi* rdi, int grid, tdc_curve** out) {
  return guard([&] {
    need(rdi, "rdi");
    need(out, "out");
    CurveOptions opt;
    if (grid > 0) {
      if (grid < 16) throw std::invalid_argument("grid must be at least 16 points");
      opt.grid = static_cast<std::size_t>(grid);
    }
    *out = new tdc_curve{RateCostCurve::build(rdi->rdi, opt)};
  });
}

void tdc_curve_free(tdc_curve* curve) { delete curve; }

tdc_status tdc_curve_envelope(const tdc_curve* curve, double r, double* out) {
  return guard([&] {
    need(curve, "curve");
    need(out, "out");
    *out = curve->curve.envelope(r);
  });
}

tdc_status tdc_curve_summary_json(const tdc_curve* c, tdc_text** out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    const RateCostCurve& cv = c->curve;
    Json verts = Json::array();
    for (const auto& v : cv.envelope_vertices()) verts.push_back({v.r, v.s});
    Json pieces = Json::array();
    for (const auto& p : cv.pieces())
      pieces.push_back({{"kind", p.on_curve ? "curve" : "chord"},
                        {"r0", p.r0},
                        {"s0", p.s0},
                        {"r1", p.r1},
                        {"s1", p.s1}});
    Json j{{"classification", curve_class_name(cv.classification())},
           {"r_sup", cv.r_sup()},
           {"asymptotic", cv.asymptotic()},
           {"r_max", cv.r_max()},
           {"initial_slope", cv.initial_slope()},
           {"vertices", verts},
           {"pieces", pieces}};
    j["s_sup"] = std::isfinite(cv.s_sup()) ? Json(cv.s_sup()) : Json("inf");
    if (cv.classification() == CurveClass::linear_alpha) j["alpha"] = cv.alpha();
    const double fs = cv.final_slope();
    j["final_slope"] = std::isfinite(fs) ? Json(fs) : Json("inf");
    *out = text(j.dump(2));
  });
}

tdc_status tdc_curve_csv(const tdc_curve* c, int points, tdc_text** out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    if (points < 2) throw std::invalid_argument("points must be >= 2");
    const RateCostCurve& cv = c->curve;
    const double top = cv.asymptotic() ? cv.r_max() : cv.r_sup();
    CsvTable t({"r", "s_static", "s_envelope", "classification"});
    const char* cls = curve_class_name(cv.classification());
    for (int k = 0; k < points; ++k) {
      const double r = top * k / (points - 1);
      t.add_row({str(r), str(cv.static_cost(r)), str(cv.envelope(r)), cls});
    }
    *out = text(t.str());
  });
}

tdc_status tdc_curve_pieces_csv(const tdc_curve* c, tdc_text** out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    CsvTable t({"kind", "r0", "s0", "r1", "s1", "slope"});
    for (const auto& p : c->curve.pieces())
      t.add_row({p.on_curve ? "curve" : "chord", str(p.r0), str(p.s0), str(p.r1), str(p.s1), str(p.slope())});
    *out = text(t.str());
  });
}

tdc_status tdc_curve_policy_json(const tdc_curve* c, double r, tdc_text** out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    *out = text(policy_to_json(c->curve.policy_for_target(r)).dump(2));
  });
}

tdc_status tdc_flow_from_json(const char* json, tdc_flow** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new tdc_flow{Flow(flow_from_json(parse_json_text(json)))};
  });
}

void tdc_flow_free(tdc_flow* flow) { delete flow; }

tdc_status tdc_flow_feasible_sup(const tdc_flow* flow, double* out) {
  return guard([&] {
    need(flow, "flow");
    need(out, "out");
    *out = flow->flow.feasible_sup();
  });
}

tdc_status tdc_flow_arrival_rate(const tdc_flow* flow, double* out) {
  return guard([&] {
    need(flow, "flow");
    need(out, "out");
    *out = flow->flow.spec().arrival_rate;
  });
}

tdc_status tdc_allocate_json(const tdc_flow* flow, double r_target, int use_lp, tdc_text** out) {
  return guard([&] {
    need(flow, "flow");
    need(out, "out");
    const Allocation a = use_lp ? allocate_lp(flow->flow, r_target) : allocate(flow->flow, r_target);
    *out = text(allocation_to_json(a, flow->flow).dump(2));
  });
}

tdc_status tdc_overall_build(const tdc_flow* flow, tdc_overall** out) {
  return guard([&] {
    need(flow, "flow");
    need(out, "out");
    *out = new tdc_overall{OverallCurve::build(flow->flow)};
  });
}

void tdc_overall_free(tdc_overall* overall) { delete overall; }

tdc_status tdc_overall_r_breve(const tdc_overall* o, double s, double* out) {
  return guard([&] {
    need(o, "overall");
    need(out, "out");
    *out = o->curve.r_breve(s);
  });
}

tdc_status tdc_overall_s_star(const tdc_overall* o, double r, double* out) {
  return guard([&] {
    need(o, "overall");
    need(out, "out");
    *out = o->curve.s_star(r);
  });
}

tdc_status tdc_overall_csv(const tdc_overall* o, int points, tdc_text** out) {
  return guard([&] {
    need(o, "overall");
    need(out, "out");
    if (points < 2) throw std::invalid_argument("points must be >= 2");
    const OverallCurve& oc = o->curve;
    const double top = std::isfinite(oc.s_sup()) ? oc.s_sup() : oc.s_max();
    CsvTable t({"s", "r_breve"});
    for (int k = 0; k < points; ++k) {
      const double s = top * k / (points - 1);
      t.add_row({str(s), str(oc.r_breve(s))});
    }
    *out = text(t.str());
  });
}

tdc_status tdc_erlang_b(double servers, double load, double* out) {
  return guard([&] {
    need(out, "out");
    *out = erlang_b(servers, load);
  });
}

tdc_status tdc_diffusion_blocking(double servers, double load, double z, double* out) {
  return guard([&] {
    need(out, "out");
    *out = diffusion_blocking(servers, load, z);
  });
}

tdc_status tdc_blocking_upper_bound(double servers, double load, double c2, double* out) {
  return guard([&] {
    need(out, "out");
    *out = blocking_upper_bound(servers, load, c2);
  });
}

tdc_status tdc_finite_hit_ratio(const tdc_overall* o, double L, double s, double lambda, double c2,
                                double* out) {
  return guard([&] {
    need(o, "overall");
    need(out, "out");
    *out = finite_hit_ratio(o->curve, L, s, lambda, c2);
  });
}

tdc_status tdc_optimize_json(const tdc_flow* flow, const tdc_overall* o, double L, double lambda,
                             double c2, tdc_text** out) {
  return guard([&] {
    need(flow, "flow");
    need(o, "overall");
    need(out, "out");
    Json j = finite_opt_to_json(optimize(flow->flow, o->curve, L, lambda, c2));
    const RegimeThresholds th = regime_thresholds(flow->flow, o->curve, lambda, c2);
    j["lambda_threshold"] = th.lambda_threshold;
    j["L_threshold"] = std::isfinite(th.L_threshold) ? Json(th.L_threshold) : Json("inf");
    j["thresholds_truncated"] = th.truncated;
    *out = text(j.dump(2));
  });
}

tdc_status tdc_qc_verify_json(unsigned max_L, unsigned threads, tdc_text** out) {
  return guard([&] {
    need(out, "out");
    if (max_L < 6) throw std::invalid_argument("max_L must be >= 6");
    const QcSweepResult r = qc_sweep(max_L, threads);
    Json j{{"all_nonnegative", r.all_nonnegative},
           {"max_L", r.max_L},
           {"evaluated", r.evaluated},
           {"seconds", r.seconds},
           {"delta_6_1", qc_discriminant(6, 1).get_str()}};
    if (r.witness) j["witness"] = {r.witness->first, r.witness->second};
    *out = text(j.dump(2));
  });
}

tdc_status tdc_qc_discriminant(unsigned L, unsigned l, tdc_text** out) {
  return guard([&] {
    need(out, "out");
    if (L < 6 || l < 1 || l + 5 > L) throw DomainError("discriminant needs L >= 6 and 1 <= l <= L-5");
    mpq_class v = qc_discriminant(L, l);
    *out = text(v.get_num().get_str() + "/" + v.get_den().get_str());
  });
}

tdc_status tdc_simulate_json(const char* config_json, unsigned replications, unsigned threads,
                             int include_ecdf, tdc_text** out) {
  return guard([&] {
    need(config_json, "config_json");
    need(out, "out");
    SimConfig c = sim_config_from_json(parse_json_text(config_json));
    if (include_ecdf) c.record_caching_times = true;
    if (replications == 0) replications = 1;
    const SimReport r = replications == 1 ? run(c) : run_replications(c, replications, threads);
    Json j = sim_report_to_json(r, include_ecdf != 0);
    j["arrivals"] = arrivals_to_json(c.arrivals);
    j["buffer"] = c.buffer ? Json(*c.buffer) : Json(nullptr);
    j["seed"] = c.seed;
    j["replications"] = replications;
    *out = text(j.dump(2));
  });
}

namespace {

std::string trace_csv(const ControllerState& st, const char* measured) {
  CsvTable t({"epoch", "beta", measured, "stderr", "window"});
  for (const auto& h : st.history)
    t.add_row({std::to_string(h.epoch), str(h.beta), str(h.measured), str(h.stderr_), std::to_string(h.window)});
  return t.str();
}

Json state_json(const ControllerState& st) {
  return {{"beta", st.beta},
          {"measured", st.measured},
          {"measured_stderr", st.measured_stderr},
          {"converged", st.converged},
          {"epochs", st.epochs},
          {"k_star", st.k_star},
          {"diagnostic", st.diagnostic}};
}

}  // namespace

tdc_status tdc_control_infinite(const tdc_flow* flow, double target, uint64_t seed, tdc_text** trace,
                                tdc_text** summary) {
  return guard([&] {
    need(flow, "flow");
    const Flow& f = flow->flow;
    const std::vector<CachePolicy> idle(f.size(), CachePolicy::never());
    SimulatedEnvironment env(sim_classes(f, idle), ArrivalProcess::poisson(f.spec().arrival_rate), std::nullopt,
                             seed, f.spec().bits_per_item);
    const ControllerState st = run_infinite(target, f.curves(), env);
    if (trace) *trace = text(trace_csv(st, "S_hat"));
    if (summary) {
      Json j = state_json(st);
      j["mode"] = "infinite";
      j["target_S"] = target;
      *summary = text(j.dump(2));
    }
  });
}

tdc_status tdc_control_finite(const tdc_flow* flow, unsigned L, uint64_t seed, tdc_text** trace,
                              tdc_text** summary) {
  return guard([&] {
    need(flow, "flow");
    if (L < 1) throw DomainError("buffer must hold at least one item");
    const Flow& f = flow->flow;
    const std::vector<CachePolicy> idle(f.size(), CachePolicy::never());
    SimulatedEnvironment env(sim_classes(f, idle), ArrivalProcess::poisson(f.spec().arrival_rate),
                             std::size_t{L}, seed, f.spec().bits_per_item);
    const ControllerState st = run_finite(f.curves(), env);
    if (trace) *trace = text(trace_csv(st, "R_hat"));
    if (summary) {
      Json j = state_json(st);
      j["mode"] = "finite";
      j["L"] = L;
      *summary = text(j.dump(2));
    }
  });
}

namespace {

Json verdict_json(const Verdict& v) {
  return {{"id", v.id}, {"title", v.title}, {"passed", v.passed}, {"detail", v.detail}, {"seconds", v.seconds}};
}

}  // namespace

tdc_status tdc_validate_json(uint64_t seed, unsigned threads, double perturbation, const char* ids,
                             int* all_passed, tdc_text** out) {
  return guard([&] {
    need(out, "out");
    AcceptanceOptions opt;
    opt.seed = seed;
    opt.threads = threads == 0 ? 1 : threads;
    opt.erlang_perturbation = perturbation;
    std::vector<std::string> list;
    if (ids && *ids) {
      std::stringstream ss(ids);
      for (std::string id; std::getline(ss, id, ',');)
        if (!id.empty()) list.push_back(id);
    } else {
      list = criterion_ids();
    }
    for (const auto& id : list) {
      const auto known = criterion_ids();
      if (std::find(known.begin(), known.end(), id) == known.end())
        throw std::invalid_argument("unknown criterion '" + id + "'");
    }
    const auto verdicts = run_acceptance(opt, list);
    bool ok = true;
    Json arr = Json::array();
    for (const auto& v : verdicts) {
      ok = ok && v.passed;
      arr.push_back(verdict_json(v));
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
    *out = text(Json{{"passed", ok}, {"seed", seed}, {"criteria", arr}}.dump(2));
  });
}

tdc_status tdc_reproduce_json(const char* preset, uint64_t seed, unsigned threads, int run_checks, int* passed,
                              tdc_text** out) {
  return guard([&] {
    need(preset, "preset");
    need(out, "out");
    if (!is_reproduce_preset(preset)) throw ConfigError(std::string("unknown preset '") + preset + "'");
    AcceptanceOptions opt;
    opt.seed = seed;
    opt.threads = threads == 0 ? 1 : threads;
    const ReproduceResult r = reproduce(preset, opt, run_checks != 0);
    Json files = Json::array();
    for (const auto& f : r.files) files.push_back({{"name", f.name}, {"content", f.content}});
    Json verdicts = Json::array();
    for (const auto& v : r.verdicts) verdicts.push_back(verdict_json(v));
    if (passed) *passed = r.passed ? 1 : 0;
    *out = text(Json{{"preset", r.preset}, {"passed", r.passed}, {"verdicts", verdicts}, {"files", files}}.dump());
  });
}

}  // extern "C"
