#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scrooge/json.hpp"
#include "scrooge/parallel.hpp"

namespace scrooge {

struct CriterionResult {
  int id = 0;
  std::string title;
  // Outcome of the statistical and numerical checks (seed-determined).
  bool checks_passed = false;
  // Wall-clock budget; 0 means none. Timing is kept out of `details`.
  double time_limit = 0.0;
  double seconds = 0.0;
  std::string summary;
  Json details;

  bool within_time() const { return time_limit <= 0.0 || seconds < time_limit; }
  bool passed() const { return checks_passed && within_time(); }
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  Parallelism par;
};

/// Criterion ids covered by "all" or a module name (densities, sampling,
/// infotheory, dicechannel, coinchannel, core). Throws InvalidArgument.
std::vector<int> criteria_for(std::string_view target);

/// Runs one acceptance criterion (1..12). Criterion k draws from seed
/// stream 100 + k, so criteria can be run alone with the same results.
CriterionResult run_criterion(int id, const VerifyOptions& options);

std::vector<CriterionResult> run_verification(std::string_view target, const VerifyOptions& options);

/// The deterministic part of a result set (no timings).
Json verification_json(const std::vector<CriterionResult>& results, const VerifyOptions& options);

/// "criterion  3 PASS  <title> | <summary> (1.2 s)"
std::string format_result_line(const CriterionResult& r);

}  // namespace scrooge
