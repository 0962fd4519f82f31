#include "tdcache/presets.hpp"

#include <array>

#include "tdcache/errors.hpp"

namespace tdcache {
namespace {

constexpr std::array<std::array<double, 10>, 3> kFlowWeights{{
    {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1},
    {0.2, 0.2, 0.2, 0.0, 0.0, 0.0, 0.2, 0.2, 0.0, 0.0},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.2, 0.2, 0.2, 0.2},
}};

int flow_index(std::string_view name) {
  if (name == "pi1") return 0;
  if (name == "pi2") return 1;
  if (name == "pi3") return 2;
  return -1;
}

}  // namespace

RdiSpec preset_rdi(std::string_view name) {
  if (name == "p1") return exponential(1.0);
  if (name == "p2") return uniform(0.0, 1.0);
  if (name == "p3") return triangular(0.0, 2.0, 1.0);
  if (name == "p4") return pareto(1.0, 1.0);
  if (name == "p5") return arcsine(2.0);
  if (name == "p6") return preset_rdi("p1").then(density_scale(0.6));
  if (name == "p7") return preset_rdi("p2").then(time_scale(0.5));
  if (name == "p8") return preset_rdi("p3").then(time_shift(1.0));
  if (name == "p9") return preset_rdi("p4").then(density_scale(0.4));
  if (name == "p10") return preset_rdi("p5").then(density_scale(0.8)).then(rate_shift(0.2, 1.0));
  throw ConfigError("unknown RDI preset: " + std::string(name));
}

std::vector<std::string> preset_rdi_names() {
  return {"p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8", "p9", "p10"};
}

bool is_preset_rdi(std::string_view name) {
  for (const auto& n : preset_rdi_names())
    if (n == name) return true;
  return false;
}

FlowSpec preset_flow(std::string_view name, double arrival_rate, double bits_per_item, double c2) {
  const int idx = flow_index(name);
  if (idx < 0) throw ConfigError("unknown flow preset: " + std::string(name));
  FlowSpec f;
  const auto names = preset_rdi_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double w = kFlowWeights[idx][i];
    if (w > 0.0) f.classes.push_back({names[i], w, preset_rdi(names[i])});
  }
  f.arrival_rate = arrival_rate;
  f.bits_per_item = bits_per_item;
  f.c2 = c2;
  return f;
}

std::vector<std::string> preset_flow_names() { return {"pi1", "pi2", "pi3"}; }

bool is_preset_flow(std::string_view name) { return flow_index(name) >= 0; }

}  // namespace tdcache
