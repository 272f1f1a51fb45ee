#include <cstdio>
#include <cstdlib>
#include <string>

#include "hlx/acceptance.hpp"

// Usage: hlx_acceptance [id ...]
int main(int argc, char** argv) {
  hlx::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& l : hlx::run_acceptance(opt)) {
    std::printf("%s\n", l.line().c_str());
    std::fflush(stdout);
    failed += !l.pass;
  }
  std::printf("acceptance: %d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
