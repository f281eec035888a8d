#pragma once

// Named verification suites: oracle, property, and Monte Carlo checks that
// gate a release.  Shared between the `covspec verify` subcommand and the
// top-level acceptance test binary.

#include <cstdint>
#include <string>
#include <vector>

namespace covspec::verify {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;   // human-readable evidence (max deviation, KS stat, ...)
  double seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 20240801;
  int threads = 1;
  int replicates = 2000;  // Monte Carlo null-law suites
};

// All suite names, in canonical execution order.
std::vector<std::string> suite_names();

// Runs one named suite; throws InvalidInput for an unknown name.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt = {});

// Runs the given suites (empty = all), printing one "[PASS]/[FAIL] name:
// detail" line per suite to stdout.  Returns the results.
std::vector<SuiteResult> run_suites(const std::vector<std::string>& names,
                                    const SuiteOptions& opt = {},
                                    bool print = true);

}  // namespace covspec::verify
