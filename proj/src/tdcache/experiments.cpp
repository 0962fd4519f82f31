#include "tdcache/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tdcache/blocking.hpp"
#include "tdcache/finite_opt.hpp"
#include "tdcache/format.hpp"
#include "tdcache/presets.hpp"
#include "tdcache/simulator.hpp"

namespace tdcache {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers; results must be
// written by index so the output does not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string f(double x) { return format_number(x, 10); }

std::vector<CachePolicy> policies_at_cost(const Flow& flow, const OverallCurve& oc, double s) {
  std::vector<CachePolicy> out;
  for (const auto& c : allocate(flow, oc.r_breve(s)).classes) out.push_back(c.policy);
  return out;
}

SimReport simulate(const Flow& flow, std::span<const CachePolicy> policies, ArrivalProcess arrivals,
                   std::optional<std::size_t> buffer, std::size_t n, std::uint64_t seed) {
  SimConfig c;
  c.classes = sim_classes(flow, policies);
  c.arrivals = arrivals;
  c.buffer = buffer;
  c.n_arrivals = n;
  c.seed = seed;
  c.bits_per_item = flow.spec().bits_per_item;
  return run(c);
}

struct ArrivalKind {
  const char* name;
  ArrivalProcess (*make)(double);
};
const ArrivalKind kArrivalKinds[] = {{"poisson", ArrivalProcess::poisson},
                                     {"deterministic", ArrivalProcess::deterministic},
                                     {"bursty", ArrivalProcess::bursty}};

std::vector<CsvFile> fig4(const AcceptanceOptions& opt) {
  const auto names = preset_rdi_names();
  const int points = 20;
  struct Row {
    double r, s, env, t;
    SimReport sim;
  };
  std::vector<Row> rows(names.size() * points);
  std::vector<std::shared_ptr<const RateCostCurve>> curves;
  for (const auto& n : names)
    curves.push_back(std::make_shared<const RateCostCurve>(
        RateCostCurve::build(std::make_shared<const Rdi>(preset_rdi(n)))));
  parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
    const auto& c = *curves[i / points];
    const Rdi& rdi = c.rdi();
    const double q = rdi.undemand_prob();
    const double top = c.asymptotic() ? c.r_max() : c.r_sup();
    const double r = top * static_cast<double>(i % points + 1) / points * 0.98;
    const double t = rdi.quantile(r + q);
    SimConfig cfg;
    cfg.classes = {{1.0, c.rdi_ptr(), CachePolicy::fixed(t)}};
    cfg.arrivals = ArrivalProcess::poisson(10.0);
    cfg.n_arrivals = 100'000;
    cfg.seed = opt.seed + 1000 + i;
    rows[i] = {r, rate_cost(rdi, r), c.envelope(r), t, run(cfg)};
  });
  CsvTable table({"class", "curve_class", "r", "s_static", "s_envelope", "t", "sim_hit_ratio",
                  "sim_hit_ratio_stderr", "sim_caching_time", "sim_caching_time_stderr"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    table.add_row({names[i / points], curve_class_name(curves[i / points]->classification()), f(row.r), f(row.s),
                   f(row.env), f(row.t), f(row.sim.hit_ratio.mean), f(row.sim.hit_ratio.stderr_),
                   f(row.sim.caching_time.mean), f(row.sim.caching_time.stderr_)});
  }
  return {{"fig4_rate_cost.csv", table.str()}};
}

std::vector<CsvFile> fig5(const AcceptanceOptions& opt) {
  const auto flows = preset_flow_names();
  const int points = 25;
  std::vector<Flow> built;
  std::vector<OverallCurve> curves;
  for (const auto& n : flows) {
    built.emplace_back(preset_flow(n));
    curves.push_back(OverallCurve::build(built.back()));
  }
  struct Row {
    double r, s;
    SimReport sim;
  };
  std::vector<Row> rows(flows.size() * points);
  parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
    const Flow& flow = built[i / points];
    const double r = flow.feasible_sup() * 0.98 * static_cast<double>(i % points + 1) / points;
    const Allocation a = allocate(flow, r);
    std::vector<CachePolicy> pol;
    for (const auto& c : a.classes) pol.push_back(c.policy);
    rows[i] = {r, a.cost, simulate(flow, pol, ArrivalProcess::poisson(10.0), std::nullopt, 100'000, opt.seed + 2000 + i)};
  });
  CsvTable table({"flow", "r", "s_star", "sim_hit_ratio", "sim_hit_ratio_stderr", "sim_caching_time",
                  "sim_caching_time_stderr"});
  for (std::size_t i = 0; i < rows.size(); ++i)
    table.add_row({flows[i / points], f(rows[i].r), f(rows[i].s), f(rows[i].sim.hit_ratio.mean),
                   f(rows[i].sim.hit_ratio.stderr_), f(rows[i].sim.caching_time.mean),
                   f(rows[i].sim.caching_time.stderr_)});
  return {{"fig5_overall_rate_cost.csv", table.str()}};
}

std::vector<CsvFile> fig6(const AcceptanceOptions& opt) {
  struct Case {
    std::string flow;
    double L;
    const ArrivalKind* kind;
  };
  std::vector<Case> cases;
  for (const char* fl : {"pi1", "pi2"}) {
    cases.push_back({fl, 1, &kArrivalKinds[0]});
    for (const auto& k : kArrivalKinds) cases.push_back({fl, 10, &k});
    cases.push_back({fl, 100, &kArrivalKinds[0]});
  }
  std::map<std::string, std::pair<Flow, OverallCurve>> flows;
  for (const char* fl : {"pi1", "pi2"}) {
    Flow flow(preset_flow(fl));
    OverallCurve oc = OverallCurve::build(flow);
    flows.emplace(fl, std::make_pair(std::move(flow), std::move(oc)));
  }
  const int points = 20;
  const double lambda = 10.0;
  struct Row {
    double s, r_erlang, r_diffusion, r_small;
    SimReport sim;
  };
  std::vector<Row> rows(cases.size() * points);
  parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
    const Case& c = cases[i / points];
    const auto& [flow, oc] = flows.at(c.flow);
    const double s = std::min(2.0, oc.s_sup()) * static_cast<double>(i % points + 1) / points;
    const auto pol = policies_at_cost(flow, oc, s);
    const ArrivalProcess arr = c.kind->make(lambda);
    const double rb = oc.r_breve(s);
    // Peakedness is 1 for Poisson arrivals whatever the caching-time law.
    const double c2 = arr.nominal_c2();
    const double z = c2 == 1.0 ? 1.0 : peakedness(CachingTimeLaw(flow, pol), s, c2);
    rows[i] = {s, rb * (1.0 - erlang_b(c.L, lambda * s)),
               rb * (1.0 - diffusion_blocking(c.L, lambda * s, z)), c.L / (lambda * s) * rb,
               simulate(flow, pol, arr, static_cast<std::size_t>(c.L), 100'000, opt.seed + 3000 + i)};
  });
  CsvTable table({"flow", "L", "arrivals", "s", "r_erlang", "r_diffusion", "r_small_buffer",
                  "sim_hit_ratio", "sim_hit_ratio_stderr", "sim_blocking", "sim_blocking_stderr"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Case& c = cases[i / points];
    const Row& r = rows[i];
    table.add_row({c.flow, f(c.L), c.kind->name, f(r.s), f(r.r_erlang), f(r.r_diffusion), f(r.r_small),
                   f(r.sim.hit_ratio.mean), f(r.sim.hit_ratio.stderr_), f(r.sim.blocking.mean),
                   f(r.sim.blocking.stderr_)});
  }
  return {{"fig6_finite_hit_ratio.csv", table.str()}};
}

// Optimal s* and r* over buffer sizes, analytic and from a simulated s grid.
CsvTable optimum_table(const AcceptanceOptions& opt) {
  const double Ls[] = {1, 2, 5, 10, 15, 20, 30, 50, 75, 100};
  const double lambda = 10.0;
  struct Case {
    std::string flow;
    double L;
    const ArrivalKind* kind;
  };
  std::vector<Case> cases;
  for (const char* fl : {"pi1", "pi2"})
    for (const auto& k : kArrivalKinds)
      for (double L : Ls) cases.push_back({fl, L, &k});
  std::map<std::string, std::pair<Flow, OverallCurve>> flows;
  for (const char* fl : {"pi1", "pi2"}) {
    Flow flow(preset_flow(fl));
    OverallCurve oc = OverallCurve::build(flow);
    flows.emplace(fl, std::make_pair(std::move(flow), std::move(oc)));
  }
  struct Row {
    FiniteOptResult th;
    double sim_s = 0.0, sim_r = 0.0, sim_r_stderr = 0.0;
  };
  std::vector<Row> rows(cases.size());
  parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
    const Case& c = cases[i];
    const auto& [flow, oc] = flows.at(c.flow);
    const ArrivalProcess arr = c.kind->make(lambda);
    Row row;
    row.th = optimize(flow, oc, c.L, lambda, arr.nominal_c2());
    const double hi = std::min(oc.s_max(), 1.5 * row.th.s_star), lo = 0.5 * row.th.s_star;
    const int grid = 11;
    for (int k = 0; k < grid; ++k) {
      const double s = lo + (hi - lo) * k / (grid - 1);
      const auto rep = simulate(flow, policies_at_cost(flow, oc, s), arr, static_cast<std::size_t>(c.L), 100'000,
                                opt.seed + 4000 + i * grid + k);
      if (rep.hit_ratio.mean > row.sim_r) {
        row.sim_r = rep.hit_ratio.mean;
        row.sim_r_stderr = rep.hit_ratio.stderr_;
        row.sim_s = s;
      }
    }
    rows[i] = row;
  });
  CsvTable table({"flow", "arrivals", "L", "s_star", "r_star", "regime", "sim_s_star", "sim_r_star",
                  "sim_r_star_stderr"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Case& c = cases[i];
    const Row& r = rows[i];
    table.add_row({c.flow, c.kind->name, f(c.L), f(r.th.s_star), f(r.th.r_star), regime_name(r.th.regime),
                   f(r.sim_s), f(r.sim_r), f(r.sim_r_stderr)});
  }
  return table;
}

std::vector<CsvFile> fig7(const AcceptanceOptions& opt) {
  return {{"fig7_optimal_caching_time.csv", optimum_table(opt).str()}};
}

std::vector<CsvFile> fig8(const AcceptanceOptions& opt) {
  return {{"fig8_optimal_hit_ratio.csv", optimum_table(opt).str()}};
}

std::vector<CsvFile> fig9(const AcceptanceOptions& opt) {
  const Flow flow(preset_flow("pi2"));
  const OverallCurve oc = OverallCurve::build(flow);
  struct Case {
    double L, lambda;
    const ArrivalKind* kind;
  };
  std::vector<Case> cases;
  for (double L : {1.0, 30.0, 200.0})
    for (const auto& k : kArrivalKinds)
      for (int l = 10; l <= 100; l += 10) cases.push_back({L, static_cast<double>(l), &k});
  struct Row {
    FiniteOptResult th;
    double small, large;
    SimReport sim;
  };
  std::vector<Row> rows(cases.size());
  parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
    const Case& c = cases[i];
    const ArrivalProcess arr = c.kind->make(c.lambda);
    Row row;
    row.th = optimize(flow, oc, c.L, c.lambda, arr.nominal_c2());
    const auto asym = asymptotic_performance(flow, c.L, c.lambda);
    row.small = asym.small_throughput;
    row.large = asym.large_throughput;
    row.sim = simulate(flow, policies_at_cost(flow, oc, row.th.s_star), arr, static_cast<std::size_t>(c.L),
                       100'000, opt.seed + 5000 + i);
    rows[i] = row;
  });
  CsvTable table({"L", "arrivals", "lambda", "s_star", "R_star", "R_small_buffer", "R_large_buffer",
                  "sim_throughput", "sim_throughput_stderr"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Case& c = cases[i];
    const Row& r = rows[i];
    table.add_row({f(c.L), c.kind->name, f(c.lambda), f(r.th.s_star), f(r.th.R_star), f(r.small), f(r.large),
                   f(r.sim.throughput.mean), f(r.sim.throughput.stderr_)});
  }
  return {{"fig9_throughput_vs_rate.csv", table.str()}};
}

struct Preset {
  std::vector<CsvFile> (*make)(const AcceptanceOptions&);
  std::vector<std::string> criteria;
};

const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> p{
      {"fig4", {fig4, {"A1", "A2", "A4", "A5"}}}, {"fig5", {fig5, {"A6", "A7"}}},
      {"fig6", {fig6, {"A8", "A9", "A14"}}},      {"fig7", {fig7, {"A10"}}},
      {"fig8", {fig8, {"A10"}}},                  {"fig9", {fig9, {"A11"}}}};
  return p;
}

}  // namespace

std::vector<std::string> reproduce_presets() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

bool is_reproduce_preset(const std::string& name) { return presets().count(name) > 0; }

ReproduceResult reproduce(const std::string& preset, const AcceptanceOptions& options, bool run_checks) {
  const auto it = presets().find(preset);
  if (it == presets().end()) throw std::invalid_argument("unknown preset '" + preset + "'");
  ReproduceResult res;
  res.preset = preset;
  res.files = it->second.make(options);
  if (run_checks)
    for (const auto& id : it->second.criteria) {
      res.verdicts.push_back(check_criterion(id, options));
      res.passed = res.passed && res.verdicts.back().passed;
    }
  return res;
}

}  // namespace tdcache
