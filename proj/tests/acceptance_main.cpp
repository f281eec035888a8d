// Acceptance gate: runs every verification suite and prints one
// [PASS]/[FAIL] line per criterion.  Exit status is nonzero if any fails.

#include <cstdio>

#include "verify_suites.hpp"

int main() {
  covspec::verify::SuiteOptions opt;
  const auto results = covspec::verify::run_suites({}, opt, /*print=*/true);
  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  if (failures > 0) {
    std::fprintf(stderr, "%d acceptance criterion(s) failed\n", failures);
    return 1;
  }
  return 0;
}
