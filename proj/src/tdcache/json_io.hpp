#pragma once

#include <json.hpp>

#include "tdcache/allocator.hpp"
#include "tdcache/finite_opt.hpp"
#include "tdcache/policy.hpp"
#include "tdcache/rdi.hpp"
#include "tdcache/simulator.hpp"

namespace tdcache {

using Json = nlohmann::json;

// Parsers throw ConfigError on malformed input and InvalidSpec when well-formed
// values describe an invalid distribution, flow or policy.
//
// RDI:      "p3" | {"family": "uniform", "params": [0, 2], "transforms": [...]}
//           | {"point_mass": 1.0} | {"mixture": [{"weight": w, "rdi": RDI}, ...]}
// transform {"op": "time_scale"|"time_shift"|"density_scale"|"rate_shift", "xi": x, "zeta": z}
// flow:     "pi2" | {"preset": "pi2", ...rates} | {"classes": [{"label", "weight", "rdi"}], ...rates}
//           where rates are the optional keys arrival_rate, bits_per_item, c2
// policy:   "never" | "until_requested" | t | {"atoms": [{"weight": w, "max_time": t|null|"inf"}]}
// arrivals: {"kind": "poisson"|"deterministic"|"bursty", "rate": l}
//           | {"kind": "hyperexponential", "w1", "mu1", "w2", "mu2"}
RdiSpec rdi_from_json(const Json& j);
Json rdi_to_json(const RdiSpec& spec);
FlowSpec flow_from_json(const Json& j);
Json flow_to_json(const FlowSpec& spec);
CachePolicy policy_from_json(const Json& j);
Json policy_to_json(const CachePolicy& policy);
ArrivalProcess arrivals_from_json(const Json& j);
Json arrivals_to_json(const ArrivalProcess& a);

// Simulation config. Per-class policies come from "policies" (one per class),
// "policy" (shared by all classes) or "target" (cheapest allocation reaching
// that hit ratio). Arrivals default to Poisson at the flow's arrival rate.
SimConfig sim_config_from_json(const Json& j, const CurveOptions& options = {});

Json estimate_to_json(const Estimate& e);
Json sim_report_to_json(const SimReport& r, bool include_ecdf);
Json allocation_to_json(const Allocation& a, const Flow& flow);
Json finite_opt_to_json(const FiniteOptResult& r);

Json parse_json_text(std::string_view text);
Json load_json_file(const std::string& path);

}  // namespace tdcache
