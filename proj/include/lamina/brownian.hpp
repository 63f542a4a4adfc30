#pragma once

// Brownian motion on the hyperbolic plane for the generator d/dt = Laplacian,
// with Laplacian = y^2 (d_xx + d_yy) in the half-plane. Under this
// convention the radial drift is 1 and the heat-kernel entropy is 1.

#include <cstdint>
#include <vector>

#include "lamina/hyperbolic.hpp"
#include "lamina/report.hpp"
#include "lamina/rng.hpp"

namespace lamina {

/// `half_laplacian` exists only to cross-check the drift of the scheme.
enum class Generator { laplacian, half_laplacian };

/// One step expressed in the affine frame w -> x + y w of the current
/// point: the next point is x + y*horizontal + i*y*exp(log_vertical).
/// The frame is equivariant under z -> a z + b, so steps can be replayed
/// at any translate of the current point without loss of precision.
struct PathIncrement {
  double horizontal = 0.0;
  double log_vertical = 0.0;
};

/// Draws one exact-in-Y step of length h. log Y moves by N(-h, 2h); the
/// horizontal move is Gaussian with variance 2 * (trapezoid of Y^2).
PathIncrement draw_increment(StreamRng& rng, double h, Generator gen = Generator::laplacian);

/// Half-plane point reached from z by the increment.
Complex apply_increment(Complex z, const PathIncrement& inc);

struct BrownianPath {
  double step = 0.0;
  double horizon = 0.0;
  std::uint64_t rng_stream_id = 0;
  std::vector<HPoint> samples;             // half-plane; samples[0] is the start
  std::vector<PathIncrement> increments;   // samples.size() - 1 entries
  std::vector<double> times;               // time stamp of each sample
};

/// Splits [0, horizon] into steps of length `step` (the last one may be
/// shorter). Throws ParameterError on nonpositive step, step > 0.1 or a
/// negative horizon; horizon = 0 yields the single-sample path.
BrownianPath simulate_path(const HPoint& start, double horizon, double step, std::uint64_t seed,
                           std::uint64_t stream, Generator gen = Generator::laplacian);

/// Number of steps and the length of the last one, shared by every
/// simulation loop.
struct StepPlan {
  std::size_t count = 0;
  double last = 0.0;
};
StepPlan plan_steps(double horizon, double step);

/// Endpoint of a simulated path without storing the samples.
HPoint simulate_endpoint(const HPoint& start, double horizon, double step, std::uint64_t seed,
                         std::uint64_t stream, Generator gen = Generator::laplacian);

struct HeatKernelQuery {
  double t = 1.0;
  double r = 0.0;
};

/// Heat kernel of the hyperbolic plane for d/dt = Laplacian:
///   p(t, r) = sqrt(2) e^{-t/4} (4 pi t)^{-3/2}
///             * int_r^inf s e^{-s^2/4t} / sqrt(cosh s - cosh r) ds.
/// Throws NumericalError when the quadrature does not converge.
double heat_kernel(const HeatKernelQuery& q);
double log_heat_kernel(double t, double r);

/// Total mass int_0^inf 2 pi sinh(r) p(t, r) dr by adaptive Gauss-Kronrod.
double heat_kernel_mass(double t);

/// Law of d(start, B_t): density 2 pi sinh(r) p(t, r), tabulated on a
/// uniform grid by Simpson's rule and interpolated linearly.
class RadialLaw {
 public:
  RadialLaw(double t, double r_max, std::size_t intervals = 4096);
  double cdf(double r) const;
  double t() const { return t_; }

 private:
  double t_, r_max_, h_;
  std::vector<double> cdf_;
};

/// Kolmogorov-Smirnov distance between the sample and the law.
double ks_distance(std::vector<double> samples, const RadialLaw& law);

struct RadialKsReport {
  double t = 0.0;
  double ks = 0.0;
  std::size_t samples = 0;
  double step = 0.0;
  std::uint64_t seed = 0;
};

/// Simulates N endpoints at time t and compares their distances from the
/// start with the heat-kernel radial law.
RadialKsReport heat_kernel_ks_check(double t, std::size_t N, double step, std::uint64_t seed, int threads = 0);

EstimatorReport drift_estimate(std::size_t N, double horizon, double step, std::uint64_t seed,
                               int threads = 0, Generator gen = Generator::laplacian,
                               const HPoint& start = HPoint::half_plane({0.0, 1.0}));

/// Mean of log phi(gamma(t)) / t for paths started at the disc centre;
/// phi(w) = (1 - |w|^2) / |1 - w|^2. The expected value is -1.
EstimatorReport dynkin_check(double t, std::size_t N, std::uint64_t seed, double step = 1e-2,
                             int threads = 0);

/// Circle average of log phi(r e^{i theta}) by the trapezoid rule.
double circle_mean_logphi(double r);

}  // namespace lamina
