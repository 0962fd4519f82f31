#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tdcache/allocator.hpp"
#include "tdcache/rdi.hpp"

namespace tdcache {

// The ten reference request-delay classes "p1".."p10".
RdiSpec preset_rdi(std::string_view name);
std::vector<std::string> preset_rdi_names();
bool is_preset_rdi(std::string_view name);

// Reference flows "pi1".."pi3" over the ten classes; zero-weight classes are omitted.
FlowSpec preset_flow(std::string_view name, double arrival_rate = 10.0,
                     double bits_per_item = 1000.0, double c2 = 1.0);
std::vector<std::string> preset_flow_names();
bool is_preset_flow(std::string_view name);

}  // namespace tdcache
