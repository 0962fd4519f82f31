// Command-line front end over the C interface.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdcache/tdcache.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kValidation = 2, kConfig = 3 };

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

void check(tdc_status s) {
  if (s == TDC_OK) return;
  const std::string msg = std::string(tdc_status_name(s)) + ": " + tdc_last_error();
  throw CliError(s == TDC_INTERNAL_ERROR ? kInternal : kConfig, msg);
}

struct TextDel {
  void operator()(tdc_text* t) const { tdc_text_free(t); }
};
struct RdiDel {
  void operator()(tdc_rdi* p) const { tdc_rdi_free(p); }
};
struct CurveDel {
  void operator()(tdc_curve* p) const { tdc_curve_free(p); }
};
struct FlowDel {
  void operator()(tdc_flow* p) const { tdc_flow_free(p); }
};
struct OverallDel {
  void operator()(tdc_overall* p) const { tdc_overall_free(p); }
};
using Text = std::unique_ptr<tdc_text, TextDel>;
using RdiPtr = std::unique_ptr<tdc_rdi, RdiDel>;
using CurvePtr = std::unique_ptr<tdc_curve, CurveDel>;
using FlowPtr = std::unique_ptr<tdc_flow, FlowDel>;
using OverallPtr = std::unique_ptr<tdc_overall, OverallDel>;

std::string take(tdc_text* raw) {
  Text t(raw);
  return std::string(tdc_text_data(t.get()), tdc_text_size(t.get()));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CliError(kConfig, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// An argument is a path to a JSON file, inline JSON, or a bare preset name.
std::string json_arg(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return read_file(arg);
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[' || arg[first] == '"'))
    return arg;
  return Json(arg).dump();
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw CliError(kConfig, "cannot write " + out);
  f << content;
  if (!content.empty() && content.back() != '\n') f << '\n';
}

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
};

FlowPtr load_flow(const std::string& arg) {
  tdc_flow* f = nullptr;
  check(tdc_flow_from_json(json_arg(arg).c_str(), &f));
  return FlowPtr(f);
}

RdiPtr load_rdi(const std::string& arg) {
  tdc_rdi* r = nullptr;
  check(tdc_rdi_from_json(json_arg(arg).c_str(), &r));
  return RdiPtr(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-domain caching: rate-cost curves, allocation, blocking, simulation and control"};
  app.require_subcommand(1);
  // Global flags may follow the subcommand.
  app.fallthrough();
  app.set_version_flag("--version", std::string(tdc_version()));

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (directory for reproduce); stdout when omitted");

  // curve
  auto* curve = app.add_subcommand("curve", "Rate-cost curve of one class as CSV");
  std::string curve_rdi;
  int curve_grid = 0, curve_points = 0;
  curve->add_option("--rdi", curve_rdi, "Preset name, inline JSON or JSON file")->required();
  curve->add_option("--grid", curve_grid, "Tabulation size (0: default)");
  curve->add_option("--points", curve_points, "Rows in the CSV (default: grid size, at least 2)");

  // envelope
  auto* envelope = app.add_subcommand("envelope", "Convex envelope summary, pieces and policy");
  std::string env_rdi;
  int env_grid = 0;
  std::optional<double> env_r;
  bool env_csv = false;
  envelope->add_option("--rdi", env_rdi, "Preset name, inline JSON or JSON file")->required();
  envelope->add_option("--grid", env_grid, "Tabulation size (0: default)");
  envelope->add_option("--r", env_r, "Also report the envelope cost and policy at this hit ratio");
  envelope->add_flag("--pieces-csv", env_csv, "Emit the envelope pieces as CSV instead of JSON");

  // allocate
  auto* allocate = app.add_subcommand("allocate", "Cost-minimizing allocation for a target hit ratio");
  std::string alloc_flow;
  double alloc_r = 0.0;
  bool alloc_lp = false;
  allocate->add_option("--flow", alloc_flow, "Flow preset, inline JSON or JSON file")->required();
  allocate->add_option("--target-r", alloc_r, "Target overall hit ratio")->required();
  allocate->add_flag("--lp", alloc_lp, "Use the linear-program allocator");

  // overall-curve
  auto* overall = app.add_subcommand("overall-curve", "Best hit ratio versus mean caching time as CSV");
  std::string overall_flow;
  int overall_points = 201;
  overall->add_option("--flow", overall_flow, "Flow preset, inline JSON or JSON file")->required();
  overall->add_option("--points", overall_points, "Rows in the CSV")->capture_default_str();

  // blocking
  auto* blocking = app.add_subcommand("blocking", "Blocking probability of a buffer of L slots");
  double blk_L = 0.0, blk_load = 0.0, blk_c2 = 1.0;
  std::optional<double> blk_z;
  blocking->add_option("--L", blk_L, "Buffer slots (may be fractional)")->required();
  blocking->add_option("--load", blk_load, "Offered load in erlangs")->required();
  blocking->add_option("--c2", blk_c2, "Squared coefficient of variation of interarrival gaps")
      ->capture_default_str();
  blocking->add_option("--peakedness", blk_z, "Peakedness for the diffusion approximation (default: 1)");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Optimal mean caching time for a finite buffer");
  std::string opt_flow;
  double opt_L = 0.0, opt_c2 = 1.0;
  std::optional<double> opt_lambda;
  optimize->add_option("--flow", opt_flow, "Flow preset, inline JSON or JSON file")->required();
  optimize->add_option("--L", opt_L, "Buffer slots")->required();
  optimize->add_option("--lambda", opt_lambda, "Arrival rate (default: the flow's)");
  optimize->add_option("--c2", opt_c2, "Squared coefficient of variation of interarrival gaps")
      ->capture_default_str();

  // qc-verify
  auto* qc = app.add_subcommand("qc-verify", "Exact sign check of the quasi-concavity discriminants");
  unsigned qc_max_L = 1000;
  qc->add_option("--max-L", qc_max_L, "Largest buffer size checked")->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Discrete-event simulation from a JSON config");
  std::string sim_config;
  bool sim_ecdf = false;
  unsigned sim_reps = 1;
  simulate->add_option("--config", sim_config, "Config JSON file or inline JSON")->required();
  simulate->add_flag("--record-ecdf", sim_ecdf, "Include the caching-time ECDF summary");
  simulate->add_option("--replications", sim_reps, "Independent replications")->capture_default_str();

  // control
  auto* control = app.add_subcommand("control", "Price-driven online controller against a simulated cache");
  std::string ctl_mode, ctl_flow, ctl_summary;
  std::optional<double> ctl_target;
  std::optional<unsigned> ctl_L;
  control->add_option("--mode", ctl_mode, "infinite or finite")
      ->required()
      ->check(CLI::IsMember({"infinite", "finite"}));
  control->add_option("--flow", ctl_flow, "Flow preset, inline JSON or JSON file")->required();
  control->add_option("--target-S", ctl_target, "Storage target (infinite mode)");
  control->add_option("--L", ctl_L, "Buffer slots (finite mode)");
  control->add_option("--summary", ctl_summary, "Write the final state as JSON to this file");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "Regenerate figure data as CSV files");
  std::string repro_preset;
  bool repro_no_check = false;
  repro->add_option("preset", repro_preset, "fig4..fig9 or all")->required();
  repro->add_flag("--no-check", repro_no_check, "Skip the tolerance checks");

  // validate
  auto* validate = app.add_subcommand("validate", "Run the acceptance suite and report JSON verdicts");
  std::string val_ids;
  double val_perturb = 0.0;
  validate->add_option("--ids", val_ids, "Comma-separated criterion ids (default: all)");
  validate->add_option("--perturb-erlang", val_perturb,
                       "Relative perturbation of the Erlang-B recurrence (harness sensitivity check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*curve) {
      RdiPtr rdi = load_rdi(curve_rdi);
      tdc_curve* c = nullptr;
      check(tdc_curve_build(rdi.get(), curve_grid, &c));
      CurvePtr cp(c);
      const int points = curve_points > 0 ? curve_points : std::max(curve_grid, 512);
      tdc_text* t = nullptr;
      check(tdc_curve_csv(cp.get(), points, &t));
      emit(g.out, take(t));
    } else if (*envelope) {
      RdiPtr rdi = load_rdi(env_rdi);
      tdc_curve* c = nullptr;
      check(tdc_curve_build(rdi.get(), env_grid, &c));
      CurvePtr cp(c);
      tdc_text* t = nullptr;
      if (env_csv) {
        check(tdc_curve_pieces_csv(cp.get(), &t));
        emit(g.out, take(t));
      } else {
        check(tdc_curve_summary_json(cp.get(), &t));
        Json j = Json::parse(take(t));
        if (env_r) {
          double s = 0.0;
          check(tdc_curve_envelope(cp.get(), *env_r, &s));
          tdc_text* p = nullptr;
          check(tdc_curve_policy_json(cp.get(), *env_r, &p));
          j["at"] = {{"r", *env_r}, {"s_envelope", s}, {"policy", Json::parse(take(p))}};
        }
        emit(g.out, j.dump(2));
      }
    } else if (*allocate) {
      FlowPtr f = load_flow(alloc_flow);
      tdc_text* t = nullptr;
      check(tdc_allocate_json(f.get(), alloc_r, alloc_lp ? 1 : 0, &t));
      emit(g.out, take(t));
    } else if (*overall) {
      FlowPtr f = load_flow(overall_flow);
      tdc_overall* o = nullptr;
      check(tdc_overall_build(f.get(), &o));
      OverallPtr op(o);
      tdc_text* t = nullptr;
      check(tdc_overall_csv(op.get(), overall_points, &t));
      emit(g.out, take(t));
    } else if (*blocking) {
      double b = 0.0, d = 0.0, ub = 0.0;
      check(tdc_erlang_b(blk_L, blk_load, &b));
      check(tdc_diffusion_blocking(blk_L, blk_load, blk_z.value_or(1.0), &d));
      check(tdc_blocking_upper_bound(blk_L, blk_load, blk_c2, &ub));
      Json j{{"L", blk_L},          {"load", blk_load},   {"c2", blk_c2},
             {"erlang_b", b},       {"diffusion", d},     {"peakedness", blk_z.value_or(1.0)},
             {"upper_bound", ub}};
      emit(g.out, j.dump(2));
    } else if (*optimize) {
      FlowPtr f = load_flow(opt_flow);
      double lambda = 0.0;
      check(tdc_flow_arrival_rate(f.get(), &lambda));
      if (opt_lambda) lambda = *opt_lambda;
      tdc_overall* o = nullptr;
      check(tdc_overall_build(f.get(), &o));
      OverallPtr op(o);
      tdc_text* t = nullptr;
      check(tdc_optimize_json(f.get(), op.get(), opt_L, lambda, opt_c2, &t));
      Json j = Json::parse(take(t));
      j["L"] = opt_L;
      j["lambda"] = lambda;
      j["c2"] = opt_c2;
      emit(g.out, j.dump(2));
    } else if (*qc) {
      tdc_text* t = nullptr;
      check(tdc_qc_verify_json(qc_max_L, g.threads, &t));
      const std::string body = take(t);
      emit(g.out, body);
      const Json j = Json::parse(body);
      if (!j.at("all_nonnegative").get<bool>()) {
        std::cerr << "negative discriminant at (L, l) = " << j.at("witness").dump() << "\n";
        return kValidation;
      }
    } else if (*simulate) {
      Json cfg;
      try {
        cfg = Json::parse(json_arg(sim_config));
      } catch (const Json::exception& e) {
        throw CliError(kConfig, std::string("config: ") + e.what());
      }
      if (!cfg.is_object()) throw CliError(kConfig, "config must be a JSON object");
      if (app.get_option("--seed")->count() > 0 || !cfg.contains("seed")) cfg["seed"] = g.seed;
      tdc_text* t = nullptr;
      check(tdc_simulate_json(cfg.dump().c_str(), sim_reps, g.threads, sim_ecdf ? 1 : 0, &t));
      emit(g.out, take(t));
    } else if (*control) {
      FlowPtr f = load_flow(ctl_flow);
      tdc_text* trace = nullptr;
      tdc_text* summary = nullptr;
      if (ctl_mode == "infinite") {
        if (!ctl_target) throw CliError(kConfig, "--target-S is required in infinite mode");
        check(tdc_control_infinite(f.get(), *ctl_target, g.seed, &trace, &summary));
      } else {
        if (!ctl_L) throw CliError(kConfig, "--L is required in finite mode");
        check(tdc_control_finite(f.get(), *ctl_L, g.seed, &trace, &summary));
      }
      const std::string tr = take(trace);
      const std::string sm = take(summary);
      emit(g.out, tr);
      if (!ctl_summary.empty())
        emit(ctl_summary, sm);
      else
        std::cerr << sm << "\n";
    } else if (*repro) {
      std::vector<std::string> presets;
      if (repro_preset == "all")
        presets = {"fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
      else
        presets = {repro_preset};
      const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw CliError(kConfig, "cannot create " + dir.string() + ": " + ec.message());
      bool all_passed = true;
      for (const auto& p : presets) {
        int passed = 0;
        tdc_text* t = nullptr;
        check(tdc_reproduce_json(p.c_str(), g.seed, g.threads, repro_no_check ? 0 : 1, &passed, &t));
        const Json j = Json::parse(take(t));
        for (const auto& f : j.at("files")) {
          const fs::path path = dir / f.at("name").get<std::string>();
          emit(path.string(), f.at("content").get<std::string>());
          std::cout << "wrote " << path.string() << "\n";
        }
        for (const auto& v : j.at("verdicts"))
          std::cout << v.at("id").get<std::string>() << (v.at("passed").get<bool>() ? " PASS: " : " FAIL: ")
                    << v.at("detail").get<std::string>() << "\n";
        all_passed = all_passed && passed != 0;
      }
      if (!repro_no_check && !all_passed) return kValidation;
    } else if (*validate) {
      int passed = 0;
      tdc_text* t = nullptr;
      check(tdc_validate_json(g.seed, g.threads, val_perturb, val_ids.empty() ? nullptr : val_ids.c_str(),
                              &passed, &t));
      const std::string body = take(t);
      emit(g.out, body);
      if (!g.out.empty()) {
        const Json j = Json::parse(body);
        for (const auto& v : j.at("criteria"))
          std::cerr << v.at("id").get<std::string>() << (v.at("passed").get<bool>() ? " PASS" : " FAIL") << "\n";
      }
      if (!passed) return kValidation;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed library output: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
