#include "tdcache/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tdcache/blocking.hpp"
#include "tdcache/controller.hpp"
#include "tdcache/finite_opt.hpp"
#include "tdcache/format.hpp"
#include "tdcache/presets.hpp"
#include "tdcache/qc.hpp"
#include "tdcache/simulator.hpp"

namespace tdcache {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double x) { return format_number(x, 6); }

struct Detail {
  std::ostringstream out;
  bool ok = true;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      out << "FAIL " << what << "; ";
    }
  }
  void note(const std::string& what) { out << what << "; "; }
};

std::shared_ptr<const Rdi> make_rdi(const RdiSpec& spec) { return std::make_shared<const Rdi>(spec); }

double grid_point(int k, int n, double hi) { return (k + 0.5) / n * hi; }

// Closed-form rate-cost against the generic quantile route.
Verdict a1(const AcceptanceOptions&) {
  Detail d;
  const auto t0 = Clock::now();
  for (const char* name : {"p1", "p2", "p3", "p4", "p5"}) {
    const RdiSpec spec = preset_rdi(name);
    const Rdi rdi(spec);
    const auto& fam = std::get<FamilySpec>(spec.base);
    double worst = 0.0;
    for (int k = 0; k < 512; ++k) {
      const double r = grid_point(k, 512, 1.0 - rdi.undemand_prob());
      worst = std::max(worst, std::abs(rate_cost(rdi, r) - rate_cost_closed_form(fam.family, fam.params, r)));
    }
    d.require(worst <= 1e-8, std::string(name) + " max diff " + num(worst));
    d.note(std::string(name) + " " + num(worst));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  d.require(secs < 1.0, "runtime " + num(secs) + " s");
  return {"A1", "closed-form rate-cost curves", d.ok, d.out.str()};
}

double psi3_law(const Rdi& old, double r, double xi) {
  return xi * rate_cost(old, r / xi) + (1.0 - xi) * old.quantile(r / xi + old.undemand_prob());
}

Verdict a2(const AcceptanceOptions&) {
  Detail d;
  const int n = 512;
  auto check_law = [&](const std::string& label, const Rdi& now,
                       const std::function<double(double)>& law) {
    double worst = 0.0;
    const double hi = 1.0 - now.undemand_prob();
    for (int k = 0; k < n; ++k) {
      const double r = grid_point(k, n, hi);
      worst = std::max(worst, std::abs(rate_cost(now, r) - law(r)));
    }
    d.require(worst <= 1e-8, label + " max diff " + num(worst));
    d.note(label + " " + num(worst));
  };

  {
    const Rdi old(preset_rdi("p2")), now(preset_rdi("p7"));
    check_law("time_scale(0.5) p2", now, [&](double r) { return rate_cost(old, r) / 0.5; });
  }
  {
    const Rdi old(preset_rdi("p3")), now(preset_rdi("p8"));
    check_law("time_shift(1) p3", now, [&](double r) { return rate_cost(old, r) + 1.0; });
  }
  {
    const Rdi old(preset_rdi("p1")), now(preset_rdi("p6"));
    check_law("density_scale(0.6) p1", now, [&](double r) { return psi3_law(old, r, 0.6); });
  }
  {
    const Rdi old(preset_rdi("p4")), now(preset_rdi("p9"));
    check_law("density_scale(0.4) p4", now, [&](double r) { return psi3_law(old, r, 0.4); });
  }
  {
    const Rdi base(preset_rdi("p5"));
    const Rdi mid(preset_rdi("p5").then(density_scale(0.8)));
    check_law("density_scale(0.8) p5", mid, [&](double r) { return psi3_law(base, r, 0.8); });

    // Rate shift (xi = 0.2, zeta = 1): unchanged while t < zeta, shifted branch
    // once t >= zeta, flat across the atom.
    const Rdi now(preset_rdi("p10"));
    const double xi = 0.2, zeta = 1.0;
    const double q_old = mid.undemand_prob();
    const double r_at = hit_ratio(mid, zeta);
    auto upper = [&](double r) {
      return rate_cost(mid, r - xi) + xi * (zeta - mid.quantile(r + q_old - xi));
    };
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const double r = grid_point(k, n, 1.0 - now.undemand_prob());
      const double s = rate_cost(now, r);
      double expect;
      if (r < r_at)
        expect = rate_cost(mid, r);
      else if (r > r_at + xi)
        expect = upper(r);
      else
        expect = mean_caching_time(now, zeta);
      worst = std::max(worst, std::abs(s - expect));
    }
    const double jump_left = rate_cost(mid, r_at);
    const double jump_right = upper(r_at + xi);
    const double flat_new = mean_caching_time(now, zeta);
    worst = std::max({worst, std::abs(flat_new - jump_left), std::abs(flat_new - jump_right)});
    d.require(worst <= 1e-8, "rate_shift(0.2,1) max diff " + num(worst));
    d.note("rate_shift(0.2,1) " + num(worst));
  }
  return {"A2", "transform laws", d.ok, d.out.str()};
}

Verdict a3(const AcceptanceOptions& opt) {
  Detail d;
  const double eps = opt.erlang_perturbation;
  auto rec = [&](unsigned L, double a) { return erlang_b_recurrence(L, a) + eps; };
  const double loads[] = {0.01, 0.1, 0.5, 1, 2, 5, 10, 20, 50, 100, 150, 170, 200, 300};
  double worst_direct = 0.0;
  for (unsigned L = 1; L <= 170; ++L)
    for (double a : loads) worst_direct = std::max(worst_direct, std::abs(rec(L, a) - erlang_b_direct(L, a)));
  d.require(worst_direct <= 1e-12, "recurrence vs direct " + num(worst_direct));
  double worst_cont = 0.0;
  for (unsigned L = 0; L <= 60; ++L)
    for (double a : loads) worst_cont = std::max(worst_cont, std::abs(erlang_b_integral(L, a) - rec(L, a)));
  d.require(worst_cont <= 1e-10, "continued vs recurrence " + num(worst_cont));
  const double b11 = rec(1, 1.0);
  d.require(b11 == 0.5, "B(1,1) = " + format_number(b11));
  d.note("recurrence vs direct " + num(worst_direct) + ", continued vs recurrence " + num(worst_cont) +
         ", B(1,1) = " + format_number(b11));
  return {"A3", "Erlang-B routes", d.ok, d.out.str()};
}

Verdict a4(const AcceptanceOptions&) {
  Detail d;
  for (double rate : {0.5, 1.0, 2.0}) {
    const Rdi rdi(exponential(rate));
    double worst = 0.0;
    for (int k = 0; k < 512; ++k) {
      const double r = grid_point(k, 512, 1.0);
      worst = std::max(worst, std::abs(rate_cost(rdi, r) - r / rate));
    }
    d.require(worst <= 1e-8, "exponential(" + num(rate) + ") deviation " + num(worst));
  }
  for (const char* name : {"p2", "p3", "p4", "p5"}) {
    const Rdi rdi(preset_rdi(name));
    std::vector<double> rs, ss;
    const double hi = 0.99 * (1.0 - rdi.undemand_prob());
    for (int k = 0; k < 512; ++k) {
      rs.push_back(grid_point(k, 512, hi));
      ss.push_back(rate_cost(rdi, rs.back()));
    }
    double num_ = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      num_ += rs[i] * ss[i];
      den += rs[i] * rs[i];
    }
    const double slope = num_ / den;
    double dev = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) dev = std::max(dev, std::abs(ss[i] - slope * rs[i]));
    d.require(dev > 1e-3, std::string(name) + " deviation " + num(dev));
    d.note(std::string(name) + " deviation " + num(dev));
  }
  return {"A4", "only exponential curves are linear", d.ok, d.out.str()};
}

Verdict a5(const AcceptanceOptions& opt) {
  Detail d;
  double worst_rel = 0.0;
  int i = 0;
  for (const auto& name : preset_rdi_names()) {
    const auto t0 = Clock::now();
    auto rdi = make_rdi(preset_rdi(name));
    const double q = rdi->undemand_prob();
    const double t = rdi->quantile(0.5 * (1.0 - q) + q);
    const double r_th = hit_ratio(*rdi, t), s_th = mean_caching_time(*rdi, t);
    SimConfig c;
    c.classes = {{1.0, rdi, CachePolicy::fixed(t)}};
    c.arrivals = ArrivalProcess::poisson(10.0);
    c.seed = opt.seed + 100 + i++;
    const SimReport rep = run(c);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const double dr = std::abs(rep.hit_ratio.mean - r_th), ds = std::abs(rep.caching_time.mean - s_th);
    d.require(dr <= 3 * rep.hit_ratio.stderr_,
              name + " hit " + num(rep.hit_ratio.mean) + " vs " + num(r_th) + " (" + num(dr / rep.hit_ratio.stderr_) + " se)");
    d.require(ds <= 3 * rep.caching_time.stderr_,
              name + " caching time " + num(rep.caching_time.mean) + " vs " + num(s_th) + " (" +
                  num(ds / rep.caching_time.stderr_) + " se)");
    d.require(secs < 30.0, name + " runtime " + num(secs) + " s");
    worst_rel = std::max({worst_rel, dr / r_th, ds / s_th});
  }
  d.note("max relative error " + num(worst_rel));
  return {"A5", "infinite-buffer simulation matches theory", d.ok, d.out.str()};
}

Verdict a6(const AcceptanceOptions&) {
  Detail d;
  std::map<std::string, double> cost, gain;
  for (const auto& f : preset_flow_names()) {
    const Flow flow(preset_flow(f));
    cost[f] = allocate(flow, 0.7).cost;
    gain[f] = OverallCurve::build(flow).r_breve(0.8);
  }
  const double save1 = 100.0 * (1.0 - cost["pi2"] / cost["pi1"]);
  const double save3 = 100.0 * (1.0 - cost["pi2"] / cost["pi3"]);
  const double g1 = 100.0 * gain["pi2"] / gain["pi1"];
  const double g3 = 100.0 * gain["pi2"] / gain["pi3"];
  d.require(std::abs(save1 - 36.4) <= 1.5, "saving vs pi1 " + num(save1) + "% (expected 36.4)");
  d.require(std::abs(save3 - 51.8) <= 1.5, "saving vs pi3 " + num(save3) + "% (expected 51.8)");
  d.require(std::abs(g1 - 134.0) <= 5.0, "hit ratio gain vs pi1 " + num(g1) + "% (expected 134)");
  d.require(std::abs(g3 - 167.0) <= 5.0, "hit ratio gain vs pi3 " + num(g3) + "% (expected 167)");
  d.note("costs at r=0.7: " + num(cost["pi1"]) + " " + num(cost["pi2"]) + " " + num(cost["pi3"]) +
         "; hit ratios at s=0.8: " + num(gain["pi1"]) + " " + num(gain["pi2"]) + " " + num(gain["pi3"]));
  return {"A6", "storage savings between reference flows", d.ok, d.out.str()};
}

Verdict a7(const AcceptanceOptions&) {
  Detail d;
  const std::map<std::string, double> expect{{"pi1", 0.9}, {"pi2", 1.0}, {"pi3", 0.8}};
  for (const auto& [name, sup] : expect) {
    const Flow flow(preset_flow(name));
    d.require(std::abs(flow.feasible_sup() - sup) <= 1e-12, name + " sup " + num(flow.feasible_sup()));
    const OverallCurve oc = OverallCurve::build(flow);
    const bool asym = name != "pi2";
    d.require(oc.asymptotic() == asym, name + (asym ? " missing" : " unexpected") + " vertical asymptote");
    if (asym) {
      const double near = oc.s_star(sup - 1e-3), mid = oc.s_star(0.5 * sup);
      d.require(near > 10.0 * mid, name + " cost near sup " + num(near) + " not diverging");
      d.note(name + " s*(sup-1e-3)=" + num(near));
    } else {
      d.note(name + " s*(sup)=" + num(oc.s_star(sup)));
    }
  }
  return {"A7", "feasibility sups and asymptotes", d.ok, d.out.str()};
}

std::vector<CachePolicy> policies_at_cost(const Flow& flow, const OverallCurve& oc, double s) {
  std::vector<CachePolicy> out;
  for (const auto& c : allocate(flow, oc.r_breve(s)).classes) out.push_back(c.policy);
  return out;
}

Verdict a8(const AcceptanceOptions& opt) {
  Detail d;
  const Flow flow(preset_flow("pi2"));
  const OverallCurve oc = OverallCurve::build(flow);
  int i = 0;
  for (double s : {0.3, 0.6, 1.0}) {
    SimConfig c;
    c.classes = sim_classes(flow, policies_at_cost(flow, oc, s));
    c.arrivals = ArrivalProcess::poisson(10.0);
    c.buffer = 10;
    c.seed = opt.seed + 200 + i++;
    const SimReport rep = run(c);
    const double theory = erlang_b(10, 10.0 * s);
    const double z = std::abs(rep.blocking.mean - theory) / rep.blocking.stderr_;
    d.require(z <= 3.0, "s=" + num(s) + " blocking " + num(rep.blocking.mean) + " vs " + num(theory));
    d.note("s=" + num(s) + " sim " + num(rep.blocking.mean) + " erlang " + num(theory) + " (" + num(z) + " se)");
  }
  return {"A8", "Poisson blocking equals Erlang-B", d.ok, d.out.str()};
}

Verdict a9(const AcceptanceOptions& opt) {
  Detail d;
  const Flow flow(preset_flow("pi1"));
  const OverallCurve oc = OverallCurve::build(flow);
  const double s = 1.0, lambda = 10.0, L = 10.0;
  const auto policies = policies_at_cost(flow, oc, s);
  const CachingTimeLaw law(flow, policies);
  struct Case {
    ArrivalProcess arrivals;
    double limit;
  };
  int i = 0;
  for (const Case& k : {Case{ArrivalProcess::deterministic(lambda), 0.06},
                        Case{ArrivalProcess::bursty(lambda), 0.12}}) {
    const double z = peakedness(law, s, k.arrivals.nominal_c2());
    const double b = diffusion_blocking(L, lambda * s, z);
    const double r_th = oc.r_breve(s) * (1.0 - b);
    SimConfig c;
    c.classes = sim_classes(flow, policies);
    c.arrivals = k.arrivals;
    c.buffer = static_cast<std::size_t>(L);
    c.seed = opt.seed + 300 + i++;
    const SimReport rep = run(c);
    const double err = std::abs(rep.hit_ratio.mean - r_th) / rep.hit_ratio.mean;
    d.require(err <= k.limit, std::string(k.arrivals.name()) + " hit ratio error " + num(100 * err) + "%");
    d.note(std::string(k.arrivals.name()) + " sim hit " + num(rep.hit_ratio.mean) + " diffusion " + num(r_th) +
           " error " + num(100 * err) + "% (blocking sim " + num(rep.blocking.mean) + ", approx " + num(b) + ")");
  }
  return {"A9", "diffusion approximation quality", d.ok, d.out.str()};
}

Verdict a10(const AcceptanceOptions& opt) {
  Detail d;
  const Flow flow(preset_flow("pi2"));
  const OverallCurve oc = OverallCurve::build(flow);
  const double lambda = 10.0;
  {
    const auto r = optimize(flow, oc, 100, lambda, 1.0);
    d.require(std::abs(r.s_star - 1.1) <= 0.05, "L=100 s* " + num(r.s_star));
    d.require(std::abs(r.r_star - 1.0) <= 0.02, "L=100 r* " + num(r.r_star));
    d.note("L=100 s*=" + num(r.s_star) + " r*=" + num(r.r_star));
  }
  {
    const auto r = optimize(flow, oc, 1, lambda, 1.0);
    d.require(std::abs(r.s_star - 0.1) <= 0.02, "L=1 s* " + num(r.s_star));
    d.require(std::abs(r.R_star - 2000.0) <= 200.0, "L=1 R* " + num(r.R_star) + " bits/s (expected 2000)");
    d.note("L=1 s*=" + num(r.s_star) + " R*=" + num(r.R_star));
  }
  {
    const auto r = optimize(flow, oc, 20, lambda, 1.0);
    const double hi = std::min(oc.s_sup(), 1.4 * r.s_star), lo = 0.6 * r.s_star;
    double best = 0.0, best_s = 0.0;
    for (int k = 0; k <= 8; ++k) {
      const double s = lo + (hi - lo) * k / 8.0;
      SimConfig c;
      c.classes = sim_classes(flow, policies_at_cost(flow, oc, s));
      c.arrivals = ArrivalProcess::poisson(lambda);
      c.buffer = 20;
      c.n_arrivals = 200'000;
      c.seed = opt.seed + 400 + k;
      const double hit = run(c).hit_ratio.mean;
      if (hit > best) {
        best = hit;
        best_s = s;
      }
    }
    const double err = std::abs(best - r.r_star) / r.r_star;
    d.require(err <= 0.02, "L=20 sim r* " + num(best) + " vs " + num(r.r_star));
    d.note("L=20 theory s*=" + num(r.s_star) + " r*=" + num(r.r_star) + ", sim s*=" + num(best_s) + " r*=" + num(best));
  }
  return {"A10", "finite-buffer optimum", d.ok, d.out.str()};
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Verdict a11(const AcceptanceOptions&) {
  Detail d;
  const Flow flow(preset_flow("pi2"));
  const OverallCurve oc = OverallCurve::build(flow);
  std::vector<double> lams, big;
  for (int l = 10; l <= 100; l += 10) {
    lams.push_back(l);
    big.push_back(optimize(flow, oc, 200, l, 1.0).R_star);
  }
  const double slope = ls_slope(lams, big);
  d.require(std::abs(slope / 1000.0 - 1.0) <= 0.05, "L=200 slope " + num(slope));
  std::vector<double> small;
  for (int l = 20; l <= 100; l += 10) small.push_back(optimize(flow, oc, 1, l, 1.0).R_star);
  double mean = 0.0;
  for (double v : small) mean += v;
  mean /= static_cast<double>(small.size());
  const auto [lo, hi] = std::minmax_element(small.begin(), small.end());
  const double spread = std::max(mean - *lo, *hi - mean) / mean;
  d.require(spread <= 0.10, "L=1 R* ranges " + num(*lo) + ".." + num(*hi) + " (" + num(100 * spread) + "% from mean)");
  d.note("L=200 slope " + num(slope) + " bits; L=1 R* " + num(*lo) + ".." + num(*hi));
  return {"A11", "throughput regimes over arrival rate", d.ok, d.out.str()};
}

Verdict a12(const AcceptanceOptions& opt) {
  Detail d;
  const auto sweep = qc_sweep(opt.qc_max_L, opt.threads);
  if (sweep.witness)
    d.require(false, "negative discriminant at L=" + std::to_string(sweep.witness->first) +
                         " l=" + std::to_string(sweep.witness->second));
  d.require(sweep.all_nonnegative, "sweep reported a negative discriminant");
  d.require(sweep.max_L >= 1000, "sweep stopped at L=" + std::to_string(sweep.max_L));
  d.require(qc_discriminant(6, 1) == mpq_class(1, 60), "Delta_6(1) = " + qc_discriminant(6, 1).get_str());
  bool identity = true;
  for (unsigned L = 6; L <= 50 && identity; ++L) {
    const auto a = qc_coefficients(L);
    for (unsigned l = 1; l + 5 <= L; ++l)
      if (a[L + l] != qc_discriminant(L, l)) {
        identity = false;
        d.require(false, "coefficient identity at L=" + std::to_string(L) + " l=" + std::to_string(l));
        break;
      }
  }
  d.note(std::to_string(sweep.evaluated) + " discriminants up to L=" + std::to_string(sweep.max_L) + " in " +
         num(sweep.seconds) + " s");
  return {"A12", "exact quasi-concavity discriminants", d.ok, d.out.str()};
}

Verdict a13(const AcceptanceOptions& opt) {
  Detail d;
  const Flow flow(preset_flow("pi2"));
  const std::vector<CachePolicy> idle(flow.size(), CachePolicy::never());
  {
    const double target = flow.spec().arrival_rate * flow.spec().bits_per_item * allocate(flow, 0.7).cost;
    SimulatedEnvironment env(sim_classes(flow, idle), ArrivalProcess::poisson(10.0), std::nullopt, opt.seed + 500);
    const auto st = run_infinite(target, flow.curves(), env);
    const double err = std::abs(st.measured / target - 1.0);
    d.require(st.converged && st.epochs <= 50 && err <= 0.02,
              "storage controller " + num(st.measured) + " vs " + num(target) + " after " + std::to_string(st.epochs) + " epochs");
    d.note("storage controller beta=" + num(st.beta) + " S=" + num(st.measured) + " target " + num(target) +
           " epochs " + std::to_string(st.epochs));
  }
  {
    const OverallCurve oc = OverallCurve::build(flow);
    const auto best = optimize(flow, oc, 10, 10.0, 1.0);
    SimulatedEnvironment env(sim_classes(flow, idle), ArrivalProcess::poisson(10.0), std::size_t{10}, opt.seed + 501);
    const auto st = run_finite(flow.curves(), env);
    const double err = std::abs(st.measured - best.R_star) / best.R_star;
    d.require(err <= 0.03, "throughput controller " + num(st.measured) + " vs " + num(best.R_star));
    d.note("throughput controller beta=" + num(st.beta) + " R=" + num(st.measured) + " optimum " + num(best.R_star) +
           " (" + num(100 * err) + "%)");
  }
  return {"A13", "decentralized controllers", d.ok, d.out.str()};
}

Verdict a14(const AcceptanceOptions&) {
  Detail d;
  const double lambda = 10.0;
  int exact = 0, total = 0;
  for (const auto& f : preset_flow_names()) {
    const Flow flow(preset_flow(f));
    const OverallCurve oc = OverallCurve::build(flow);
    for (double L : {1.0, 5.0, 10.0, 30.0, 100.0}) {
      const FiniteBufferModel m(oc, L, lambda, 1.0);
      // Unbounded cost domains are cut at twice the optimum so the peak is interior.
      const double hi = std::isfinite(oc.s_sup()) ? oc.s_sup()
                                                  : 2.0 * optimize(flow, oc, L, lambda, 1.0).s_star;
      const int n = 512;
      std::vector<double> v(n);
      for (int k = 0; k < n; ++k) v[k] = m.hit_ratio(hi * (k + 1) / n);
      int changes = 0, last = 0;
      for (int k = 1; k < n; ++k) {
        const double diff = v[k] - v[k - 1];
        const int sign = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(v[k])) ? 0 : (diff > 0 ? 1 : -1);
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++changes;
        last = sign;
      }
      ++total;
      if (changes == 1) ++exact;
      d.require(changes == 1, f + " L=" + num(L) + " sign changes " + std::to_string(changes) +
                                  (changes == 0 && last > 0 ? " (increasing up to s_sup)" : ""));
    }
  }
  d.note(std::to_string(exact) + "/" + std::to_string(total) + " grids with exactly one sign change");
  return {"A14", "finite-buffer hit ratio is unimodal", d.ok, d.out.str()};
}

using Check = Verdict (*)(const AcceptanceOptions&);

const std::vector<std::pair<std::string, Check>>& registry() {
  static const std::vector<std::pair<std::string, Check>> r{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},   {"A5", a5},   {"A6", a6},   {"A7", a7},
      {"A8", a8}, {"A9", a9}, {"A10", a10}, {"A11", a11}, {"A12", a12}, {"A13", a13}, {"A14", a14}};
  return r;
}

}  // namespace

std::vector<std::string> criterion_ids() {
  std::vector<std::string> out;
  for (const auto& [id, fn] : registry()) out.push_back(id);
  return out;
}

Verdict check_criterion(const std::string& id, const AcceptanceOptions& options) {
  for (const auto& [key, fn] : registry()) {
    if (key != id) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn(options);
    } catch (const std::exception& e) {
      v = {id, "error", false, std::string("exception: ") + e.what()};
    }
    v.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return v;
  }
  throw std::invalid_argument("unknown criterion '" + id + "'");
}

std::vector<Verdict> run_acceptance(const AcceptanceOptions& options, const std::vector<std::string>& ids) {
  std::vector<Verdict> out;
  for (const auto& id : ids) out.push_back(check_criterion(id, options));
  return out;
}

}  // namespace tdcache
