#pragma once

// End-to-end acceptance checks, one row per criterion.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lamina {

struct CriterionRow {
  std::string id;
  std::string name;
  std::string expected;
  std::string observed;
  std::string tolerance;
  bool pass = false;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int threads = 0;
  /// Comma-separated ids or name fragments; nullopt runs everything and an
  /// empty string selects nothing.
  std::optional<std::string> filter;
  /// Multiplies every statistical tolerance (exact checks are unaffected).
  double tolerance_scale = 1.0;
  /// Called with each row as soon as it is decided.
  std::function<void(const CriterionRow&)> on_row;
};

/// Runs the selected criteria. The reproducibility row reruns the selected
/// stochastic criteria (all of them when it is selected alone) on a
/// different thread count and compares every number bit for bit.
std::vector<CriterionRow> verify_suite(const SuiteOptions& opt = {});

/// Names of all criteria, in order.
std::vector<std::pair<std::string, std::string>> suite_criteria();

void print_row(std::ostream& os, const CriterionRow& row);

}  // namespace lamina
