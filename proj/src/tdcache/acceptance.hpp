#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tdcache {

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Added to every recurrence Erlang-B value inside the Erlang-B check; a
  // nonzero value must make that check fail.
  double erlang_perturbation = 0.0;
  unsigned qc_max_L = 1000;
};

struct Verdict {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<std::string> criterion_ids();
// Throws std::invalid_argument for an unknown id.
Verdict check_criterion(const std::string& id, const AcceptanceOptions& options);
std::vector<Verdict> run_acceptance(const AcceptanceOptions& options,
                                    const std::vector<std::string>& ids = criterion_ids());

}  // namespace tdcache
