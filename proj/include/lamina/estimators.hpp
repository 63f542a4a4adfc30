#pragma once

// Monte Carlo estimators over Brownian paths in a suspension lamination.

#include <cstdint>
#include <optional>
#include <vector>

#include "lamina/brownian.hpp"
#include "lamina/report.hpp"
#include "lamina/suspension.hpp"

namespace lamina {

struct EstimatorOptions {
  double step = 1e-2;
  int threads = 0;
  std::size_t pilot_bins = 64;
  Generator generator = Generator::laplacian;
  /// Accumulate |h'| in the affine chart instead of the round metric.
  bool affine_chart = false;
};

/// Occupation histogram on the fiber. Circle bins are equal arcs of the
/// great circle P^1(R); sphere bins are latitude bands of equal height times
/// longitude sectors, hence of equal area.
class FiberHistogram {
 public:
  FiberHistogram(FiberType type, std::size_t bins);

  FiberType type() const { return type_; }
  std::size_t bins() const { return counts_.size(); }
  std::size_t bands() const { return bands_; }
  std::size_t sectors() const { return sectors_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t total() const { return total_; }

  std::size_t bin_of(const ProjectivePoint& p) const;
  void add(const ProjectivePoint& p);
  /// Bin chosen proportionally to its count, then a uniform point inside
  /// it. Uniform on the fiber while the histogram is empty.
  ProjectivePoint sample(StreamRng& rng) const;
  /// Pearson statistic against the uniform law.
  double chi_square_uniform() const;

  /// Fiber points that produced the counts, in path order.
  std::vector<ProjectivePoint> points;

 private:
  ProjectivePoint point_in_bin(std::size_t bin, StreamRng& rng) const;

  FiberType type_;
  std::size_t bands_ = 1, sectors_ = 1;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

/// Uniform point of the fiber (round measure).
ProjectivePoint uniform_fiber_point(FiberType type, StreamRng& rng);

/// (1/t) log |h'| averaged over paths. A pilot of N/4 paths run for t/2
/// from uniform fiber points builds a histogram of the fiber law; the main
/// paths start from base points drawn from the area measure and fiber
/// points drawn from that histogram. Needs N >= 64 and horizon >= 10.
EstimatorReport lyapunov_exponent(const SuspensionFoliation& f, double horizon, std::size_t N, std::uint64_t seed,
                                  const EstimatorOptions& opt = {});

/// Heat-kernel entropy rate of the leaves. Uses the increment
///   [log p(t/2, R_{t/2}) - log p(t, R_t)] / (t/2),  R_s = d(start, B_s),
/// whose limit equals that of -(1/t) log p(t, R_t) but whose bias decays
/// like 1/t^2 instead of log(t)/t. The plain estimator is reported
/// alongside. Requires simply connected leaves.
struct EntropyReport {
  EstimatorReport estimate;
  double pointwise = 0.0;  // -(1/t) mean log p(t, R_t)
  double pointwise_std_error = 0.0;
};
EntropyReport kaimanovich_entropy(const SuspensionFoliation& f, double horizon, std::size_t N, std::uint64_t seed,
                                  const EstimatorOptions& opt = {});

/// Fiber positions of N paths run for `horizon` from uniform fiber points
/// and area-distributed base points.
FiberHistogram harmonic_measure(const SuspensionFoliation& f, double horizon, std::size_t N, std::size_t bins,
                                std::uint64_t seed, const EstimatorOptions& opt = {});

struct LocalDimensionReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool low_confidence = false;
  std::vector<double> radii;
  std::vector<double> mean_log_mass;  // averaged over centres
  std::size_t centers = 0;
};

/// Regression of the averaged log mu(B(x, r)) on log r, with balls in the
/// chordal metric and mu the empirical law of `points`. Needs >= 1000
/// points and radii spanning two decades.
LocalDimensionReport local_dimension(const std::vector<ProjectivePoint>& points, const std::vector<double>& radii,
                                     std::size_t max_centers = 500);

/// Ordinary least squares y = slope x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Geometric grid of n radii from hi down to lo.
std::vector<double> geometric_radii(double hi, double lo, std::size_t n);

}  // namespace lamina
