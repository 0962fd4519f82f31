#include "tdcache/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tdcache/errors.hpp"

namespace tdcache {

CachePolicy CachePolicy::never() { return {{PolicyAtom{1.0, std::nullopt}}}; }

CachePolicy CachePolicy::fixed(double max_time) { return {{PolicyAtom{1.0, max_time}}}; }

CachePolicy CachePolicy::until_requested() {
  return {{PolicyAtom{1.0, std::numeric_limits<double>::infinity()}}};
}

void CachePolicy::validate() const {
  if (atoms.empty()) throw InvalidSpec("policy has no atoms");
  double sum = 0.0;
  int skips = 0;
  std::vector<double> times;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.weight) || a.weight < 0.0) throw InvalidSpec("policy weight must be >= 0");
    sum += a.weight;
    if (a.skip()) {
      ++skips;
    } else {
      if (std::isnan(*a.max_time) || *a.max_time < 0.0)
        throw InvalidSpec("maximum caching time must be >= 0");
      times.push_back(*a.max_time);
    }
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidSpec("policy weights must sum to 1");
  if (skips > 1) throw InvalidSpec("policy has more than one skip atom");
  std::sort(times.begin(), times.end());
  if (std::adjacent_find(times.begin(), times.end()) != times.end())
    throw InvalidSpec("policy caching times must be distinct");
}

CachePolicy CachePolicy::normalized() const {
  CachePolicy out;
  for (const auto& a : atoms) {
    if (a.weight <= 0.0) continue;
    auto same = std::find_if(out.atoms.begin(), out.atoms.end(),
                             [&](const PolicyAtom& b) { return b.max_time == a.max_time; });
    if (same != out.atoms.end())
      same->weight += a.weight;
    else
      out.atoms.push_back(a);
  }
  if (out.atoms.empty()) return never();
  return out;
}

std::string CachePolicy::describe() const {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) os << ", ";
    os << "(";
    if (atoms[i].skip())
      os << "skip";
    else
      os << "t=" << *atoms[i].max_time;
    os << ", " << atoms[i].weight << ")";
  }
  return os.str();
}

}  // namespace tdcache
