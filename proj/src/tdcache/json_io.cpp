#include "tdcache/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tdcache/errors.hpp"
#include "tdcache/presets.hpp"

namespace tdcache {

namespace {

double number(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

Family family_from(const std::string& name) {
  for (Family f : {Family::exponential, Family::uniform, Family::triangular, Family::pareto,
                   Family::arcsine})
    if (name == family_name(f)) return f;
  throw ConfigError("unknown family '" + name + "'");
}

TransformOp op_from(const std::string& name) {
  for (TransformOp op : {TransformOp::time_scale, TransformOp::time_shift,
                         TransformOp::density_scale, TransformOp::rate_shift})
    if (name == transform_name(op)) return op;
  throw ConfigError("unknown transform '" + name + "'");
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

void apply_rates(const Json& j, FlowSpec& spec) {
  spec.arrival_rate = number_or(j, "arrival_rate", spec.arrival_rate);
  spec.bits_per_item = number_or(j, "bits_per_item", spec.bits_per_item);
  spec.c2 = number_or(j, "c2", spec.c2);
}

}  // namespace

RdiSpec rdi_from_json(const Json& j) {
  return guarded([&]() -> RdiSpec {
    if (j.is_string()) {
      const auto name = j.get<std::string>();
      if (!is_preset_rdi(name)) throw ConfigError("unknown RDI preset '" + name + "'");
      return preset_rdi(name);
    }
    if (!j.is_object()) throw ConfigError("RDI must be a preset name or an object");
    RdiSpec spec;
    if (j.contains("family")) {
      spec.base = FamilySpec{family_from(j.at("family").get<std::string>()),
                             j.value("params", std::vector<double>{})};
    } else if (j.contains("point_mass")) {
      spec.base = PointMassSpec{j.at("point_mass").get<double>()};
    } else if (j.contains("mixture")) {
      MixtureSpec m;
      for (const auto& c : j.at("mixture")) {
        m.weights.push_back(number(c, "weight"));
        m.components.push_back(rdi_from_json(c.at("rdi")));
      }
      spec.base = std::move(m);
    } else if (j.contains("preset")) {
      spec = rdi_from_json(j.at("preset"));
    } else {
      throw ConfigError("RDI object needs 'family', 'point_mass', 'mixture' or 'preset'");
    }
    if (j.contains("transforms"))
      for (const auto& t : j.at("transforms"))
        spec.transforms.push_back(
            {op_from(t.at("op").get<std::string>()), number(t, "xi"), number_or(t, "zeta", 0.0)});
    Rdi{spec};  // validates
    return spec;
  });
}

Json rdi_to_json(const RdiSpec& spec) {
  Json j;
  if (const auto* f = std::get_if<FamilySpec>(&spec.base)) {
    j["family"] = family_name(f->family);
    j["params"] = f->params;
  } else if (const auto* p = std::get_if<PointMassSpec>(&spec.base)) {
    j["point_mass"] = p->location;
  } else {
    const auto& m = std::get<MixtureSpec>(spec.base);
    Json arr = Json::array();
    for (std::size_t i = 0; i < m.weights.size(); ++i)
      arr.push_back({{"weight", m.weights[i]}, {"rdi", rdi_to_json(m.components[i])}});
    j["mixture"] = arr;
  }
  if (!spec.transforms.empty()) {
    Json arr = Json::array();
    for (const auto& t : spec.transforms) {
      Json tj{{"op", transform_name(t.op)}, {"xi", t.xi}};
      if (t.op == TransformOp::rate_shift) tj["zeta"] = t.zeta;
      arr.push_back(tj);
    }
    j["transforms"] = arr;
  }
  return j;
}

FlowSpec flow_from_json(const Json& j) {
  return guarded([&]() -> FlowSpec {
    FlowSpec spec;
    if (j.is_string() || (j.is_object() && j.contains("preset"))) {
      const auto name = j.is_string() ? j.get<std::string>() : j.at("preset").get<std::string>();
      if (!is_preset_flow(name)) throw ConfigError("unknown flow preset '" + name + "'");
      spec = preset_flow(name);
      if (j.is_object()) apply_rates(j, spec);
    } else if (j.is_object() && j.contains("classes")) {
      int n = 0;
      for (const auto& c : j.at("classes")) {
        ++n;
        spec.classes.push_back({c.value("label", "c" + std::to_string(n)), number(c, "weight"),
                                rdi_from_json(c.at("rdi"))});
      }
      apply_rates(j, spec);
    } else {
      throw ConfigError("flow must be a preset name or an object with 'classes'");
    }
    try {
      spec.validate();
    } catch (const InvalidSpec& e) {
      throw ConfigError(e.what());
    }
    return spec;
  });
}

Json flow_to_json(const FlowSpec& spec) {
  Json classes = Json::array();
  for (const auto& c : spec.classes)
    classes.push_back({{"label", c.label}, {"weight", c.weight}, {"rdi", rdi_to_json(c.rdi)}});
  return {{"classes", classes},
          {"arrival_rate", spec.arrival_rate},
          {"bits_per_item", spec.bits_per_item},
          {"c2", spec.c2}};
}

CachePolicy policy_from_json(const Json& j) {
  return guarded([&]() -> CachePolicy {
    CachePolicy p;
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "never") return CachePolicy::never();
      if (s == "until_requested" || s == "inf") return CachePolicy::until_requested();
      throw ConfigError("unknown policy '" + s + "'");
    }
    if (j.is_number()) {
      p = CachePolicy::fixed(j.get<double>());
    } else if (j.is_object() && j.contains("atoms")) {
      for (const auto& a : j.at("atoms")) {
        PolicyAtom atom{number(a, "weight"), std::nullopt};
        const Json& t = a.at("max_time");
        if (t.is_number())
          atom.max_time = t.get<double>();
        else if (t.is_string() && t.get<std::string>() == "inf")
          atom.max_time = kInf;
        else if (!t.is_null())
          throw ConfigError("max_time must be a number, \"inf\" or null");
        p.atoms.push_back(atom);
      }
    } else {
      throw ConfigError("policy must be a name, a number or an object with 'atoms'");
    }
    try {
      p.validate();
    } catch (const InvalidSpec& e) {
      throw ConfigError(e.what());
    }
    return p;
  });
}

Json policy_to_json(const CachePolicy& policy) {
  Json atoms = Json::array();
  for (const auto& a : policy.atoms) {
    Json t = nullptr;
    if (a.max_time) t = std::isinf(*a.max_time) ? Json("inf") : Json(*a.max_time);
    atoms.push_back({{"weight", a.weight}, {"max_time", t}});
  }
  return {{"atoms", atoms}};
}

ArrivalProcess arrivals_from_json(const Json& j) {
  return guarded([&]() -> ArrivalProcess {
    if (!j.is_object()) throw ConfigError("arrivals must be an object");
    const auto kind = j.value("kind", std::string("poisson"));
    try {
      if (kind == "poisson") return ArrivalProcess::poisson(number(j, "rate"));
      if (kind == "deterministic") return ArrivalProcess::deterministic(number(j, "rate"));
      if (kind == "bursty") return ArrivalProcess::bursty(number(j, "rate"));
      if (kind == "hyperexponential")
        return ArrivalProcess::hyperexponential(number(j, "w1"), number(j, "mu1"),
                                                number(j, "w2"), number(j, "mu2"));
    } catch (const InvalidSpec& e) {
      throw ConfigError(e.what());
    }
    throw ConfigError("unknown arrival kind '" + kind + "'");
  });
}

Json arrivals_to_json(const ArrivalProcess& a) {
  Json j{{"kind", a.name()}, {"rate", a.rate}, {"c2", a.nominal_c2()}};
  if (a.kind == ArrivalProcess::Kind::hyperexponential) {
    j["w1"] = a.w1;
    j["mu1"] = a.mu1;
    j["w2"] = a.w2;
    j["mu2"] = a.mu2;
  }
  return j;
}

SimConfig sim_config_from_json(const Json& j, const CurveOptions& options) {
  return guarded([&]() -> SimConfig {
    if (!j.is_object()) throw ConfigError("simulation config must be an object");
    if (!j.contains("flow")) throw ConfigError("simulation config needs 'flow'");
    const Flow flow(flow_from_json(j.at("flow")), options);
    std::vector<CachePolicy> policies;
    if (j.contains("policies")) {
      for (const auto& p : j.at("policies")) policies.push_back(policy_from_json(p));
      if (policies.size() != flow.size())
        throw ConfigError("'policies' needs one entry per class");
    } else if (j.contains("policy")) {
      policies.assign(flow.size(), policy_from_json(j.at("policy")));
    } else if (j.contains("target")) {
      try {
        for (const auto& c : allocate(flow, number(j, "target")).classes)
          policies.push_back(c.policy);
      } catch (const Error& e) {
        throw ConfigError(std::string("target: ") + e.what());
      }
    } else {
      throw ConfigError("simulation config needs 'policies', 'policy' or 'target'");
    }
    SimConfig c;
    c.classes = sim_classes(flow, policies);
    c.arrivals = j.contains("arrivals") ? arrivals_from_json(j.at("arrivals"))
                                        : ArrivalProcess::poisson(flow.spec().arrival_rate);
    if (j.contains("buffer") && !j.at("buffer").is_null()) {
      const double L = number(j, "buffer");
      if (!(L >= 1.0) || L != std::floor(L)) throw ConfigError("buffer must be an integer >= 1");
      c.buffer = static_cast<std::size_t>(L);
    }
    c.n_arrivals = static_cast<std::size_t>(number_or(j, "n_arrivals", 1e6));
    c.seed = j.value("seed", std::uint64_t{1});
    c.warmup_fraction = number_or(j, "warmup_fraction", 0.1);
    c.batches = static_cast<std::size_t>(number_or(j, "batches", 32));
    c.bits_per_item = flow.spec().bits_per_item;
    c.record_caching_times = j.value("record_ecdf", false);
    try {
      c.validate();
    } catch (const InvalidSpec& e) {
      throw ConfigError(e.what());
    }
    return c;
  });
}

Json estimate_to_json(const Estimate& e) { return {{"mean", e.mean}, {"stderr", e.stderr_}}; }

Json sim_report_to_json(const SimReport& r, bool include_ecdf) {
  Json j{{"hit_ratio", estimate_to_json(r.hit_ratio)},
         {"blocking_prob", estimate_to_json(r.blocking)},
         {"mean_occupancy_items", estimate_to_json(r.occupancy)},
         {"mean_caching_time", estimate_to_json(r.caching_time)},
         {"effective_throughput", estimate_to_json(r.throughput)},
         {"empirical_c2", r.empirical_c2},
         {"measured_rate", r.measured_rate},
         {"measured_arrivals", r.measured_arrivals},
         {"duration", r.duration},
         {"censored", r.censored}};
  if (include_ecdf && r.recorded) {
    // Quantile summary of the realized caching-time law.
    const Ecdf e = caching_time_ecdf(r);
    Json pts = Json::array();
    const auto& s = e.sorted();
    for (int k = 0; k <= 100; ++k) {
      const std::size_t idx = std::min(s.size() - 1, k * (s.size() - 1) / 100);
      const double x = s[idx];
      pts.push_back({{"x", std::isfinite(x) ? Json(x) : Json("inf")}, {"G", e(x)}});
    }
    j["caching_time_ecdf"] = pts;
  }
  return j;
}

Json allocation_to_json(const Allocation& a, const Flow& flow) {
  Json classes = Json::array();
  for (std::size_t i = 0; i < a.classes.size(); ++i)
    classes.push_back({{"label", flow.spec().classes[i].label},
                       {"weight", flow.weight(i)},
                       {"hit_ratio", a.classes[i].hit_ratio},
                       {"cost", a.classes[i].cost},
                       {"policy", policy_to_json(a.classes[i].policy)}});
  return {{"beta", a.beta}, {"hit_ratio", a.hit_ratio}, {"cost", a.cost}, {"classes", classes}};
}

Json finite_opt_to_json(const FiniteOptResult& r) {
  return {{"s_star", r.s_star},
          {"r_star", r.r_star},
          {"R_star", r.R_star},
          {"regime", regime_name(r.regime)},
          {"residual", r.residual},
          {"residual_left", r.residual_left},
          {"residual_right", r.residual_right},
          {"iterations", r.iterations},
          {"quasi_concavity_verified", r.quasi_concavity_verified},
          {"diagnostic", r.diagnostic}};
}

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

}  // namespace tdcache
