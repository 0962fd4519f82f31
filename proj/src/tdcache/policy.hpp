#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tdcache {

// One point of a maximum-caching-time distribution. An empty max_time means the
// item is not admitted at all; +inf keeps it until it is requested.
struct PolicyAtom {
  double weight = 1.0;
  std::optional<double> max_time;

  bool skip() const { return !max_time.has_value(); }
};

struct CachePolicy {
  std::vector<PolicyAtom> atoms;

  static CachePolicy never();
  static CachePolicy fixed(double max_time);
  static CachePolicy until_requested();

  // Throws InvalidSpec unless weights are a distribution, times are >= 0,
  // times are distinct and there is at most one skip atom.
  void validate() const;
  // Merges duplicate times and drops zero weights.
  CachePolicy normalized() const;
  std::string describe() const;
};

}  // namespace tdcache
