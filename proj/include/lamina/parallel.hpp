#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace lamina {

/// Thread count from LAMINA_THREADS, else the hardware concurrency.
int default_threads();

/// Resolves a requested count: values <= 0 mean default_threads().
int resolve_threads(int requested);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index must
/// write only its own output slot. The exception thrown by the lowest
/// failing index is rethrown, so failures are deterministic too.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Pairwise summation in index order; the result does not depend on how the
/// values were produced.
double pairwise_sum(std::span<const double> values);

struct MeanStats {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error of the mean (n - 1 denominator).
MeanStats mean_stats(std::span<const double> values);

}  // namespace lamina
