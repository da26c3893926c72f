// Acceptance suite: one PASS/FAIL line per criterion; exit status 0 iff all pass.
// Usage: acceptance [filter]

#include <iostream>

#include "viscowave/acceptance.hpp"

int main(int argc, char** argv) {
  viscowave::AcceptanceOptions opt;
  if (argc > 1) opt.filter = argv[1];
  const auto results = viscowave::run_acceptance(opt, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return results.empty() || failed ? 1 : 0;
}
