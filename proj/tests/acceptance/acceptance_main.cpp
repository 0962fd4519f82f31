// Runs every acceptance criterion and prints one line per criterion.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "tdcache/acceptance.hpp"

int main(int argc, char** argv) {
  tdcache::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc)
      opt.seed = std::strtoull(argv[++i], nullptr, 10);
    else if (a == "--threads" && i + 1 < argc)
      opt.threads = static_cast<unsigned>(std::strtoul(argv[++i], nullptr, 10));
  }
  int failed = 0;
  for (const auto& id : tdcache::criterion_ids()) {
    const tdcache::Verdict v = tdcache::check_criterion(id, opt);
    std::printf("%-4s %s  %-40s %7.2fs  %s\n", v.id.c_str(), v.passed ? "PASS" : "FAIL", v.title.c_str(),
                v.seconds, v.detail.c_str());
    std::fflush(stdout);
    failed += v.passed ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, tdcache::criterion_ids().size());
  return failed == 0 ? 0 : 1;
}
