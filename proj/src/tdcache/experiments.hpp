#pragma once

#include <string>
#include <vector>

#include "tdcache/acceptance.hpp"

namespace tdcache {

struct CsvFile {
  std::string name;
  std::string content;
};

struct ReproduceResult {
  std::string preset;
  std::vector<CsvFile> files;
  std::vector<Verdict> verdicts;  // criteria tied to this figure
  bool passed = true;
};

// "fig4" .. "fig9".
std::vector<std::string> reproduce_presets();
bool is_reproduce_preset(const std::string& name);
ReproduceResult reproduce(const std::string& preset, const AcceptanceOptions& options,
                          bool run_checks = true);

}  // namespace tdcache
