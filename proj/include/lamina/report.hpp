#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lamina {

/// Output record of every Monte Carlo estimator.
struct EstimatorReport {
  std::string quantity;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  double horizon = 0.0;
  double step = 0.0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds; excluded from reproducibility checks
  std::vector<std::string> warnings;
};

}  // namespace lamina
