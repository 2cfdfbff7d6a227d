#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace relosc {

/// Planted faults, used to show that a suite can fail.
enum class Fault {
  None,
  SnapZero  // counting with snap tolerance 0
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  Fault fault = Fault::None;
};

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::vector<std::string> messages;  // first failures, in order
  std::vector<double> draws;          // the first random draws of the suite
  double seconds = 0.0;
  bool passed() const { return failures == 0; }
};

struct SelftestReport {
  std::uint64_t seed = 0;
  Fault fault = Fault::None;
  std::vector<SuiteResult> suites;
  bool passed() const;
};

/// Reduced-scale invariant suites: coeffs, counting, relative, classify,
/// kneser, spectra. Pass/fail does not depend on the seed.
SelftestReport run_selftest(const SelftestOptions& options = {});

std::string to_string(Fault f);

}  // namespace relosc
