#include "lamina/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "lamina/errors.hpp"
#include "lamina/parallel.hpp"

namespace lamina {

namespace {

constexpr double kPi = std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Angle of a point of P^1(R) along the great circle y = 0 of the sphere.
double circle_angle(const ProjectivePoint& p) {
  const auto x = p.sphere();
  return std::atan2(x[0], x[2]);
}

ProjectivePoint circle_point(double theta) {
  return ProjectivePoint::from_sphere({std::sin(theta), 0.0, std::cos(theta)});
}

ProjectivePoint sphere_point(double z, double lon) {
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return ProjectivePoint::from_sphere({rho * std::cos(lon), rho * std::sin(lon), z});
}

// Runs one path of the holonomy walker and returns its final state.
HolonomyState run_walker(const SuspensionFoliation& f, const HPoint& start, const ProjectivePoint& fiber,
                         double horizon, double step, StreamRng& rng, Generator gen) {
  HolonomyWalker walker(f, start, fiber, false);
  const StepPlan plan = plan_steps(horizon, step);
  for (std::size_t k = 0; k < plan.count; ++k) {
    const double h = k + 1 == plan.count ? plan.last : step;
    walker.advance(draw_increment(rng, h, gen), h);
  }
  return walker.state();
}

double kernel_time(double t, Generator gen) { return gen == Generator::laplacian ? t : 0.5 * t; }

}  // namespace

// ---------------------------------------------------------------------------
// Histogram

FiberHistogram::FiberHistogram(FiberType type, std::size_t bins) : type_(type) {
  if (bins < 1) throw ParameterError("histogram needs at least one bin");
  if (type == FiberType::circle) {
    sectors_ = bins;
  } else {
    // Factor bins = bands * sectors with bands close to sqrt(bins / 2), so
    // that cells are roughly square.
    const double target = std::sqrt(static_cast<double>(bins) / 2.0);
    std::size_t best = 1;
    for (std::size_t b = 1; b <= bins; ++b) {
      if (bins % b == 0 && std::abs(b - target) < std::abs(best - target)) best = b;
    }
    bands_ = best;
    sectors_ = bins / best;
  }
  counts_.assign(bands_ * sectors_, 0);
}

std::size_t FiberHistogram::bin_of(const ProjectivePoint& p) const {
  if (type_ == FiberType::circle) {
    const double u = (circle_angle(p) + kPi) / (2.0 * kPi);
    return std::min(sectors_ - 1, static_cast<std::size_t>(u * sectors_));
  }
  const auto x = p.sphere();
  const double zb = (std::clamp(x[2], -1.0, 1.0) + 1.0) / 2.0;
  const double lon = (std::atan2(x[1], x[0]) + kPi) / (2.0 * kPi);
  const std::size_t band = std::min(bands_ - 1, static_cast<std::size_t>(zb * bands_));
  const std::size_t sector = std::min(sectors_ - 1, static_cast<std::size_t>(lon * sectors_));
  return band * sectors_ + sector;
}

void FiberHistogram::add(const ProjectivePoint& p) {
  ++counts_[bin_of(p)];
  ++total_;
  points.push_back(p);
}

ProjectivePoint FiberHistogram::point_in_bin(std::size_t bin, StreamRng& rng) const {
  if (type_ == FiberType::circle) {
    return circle_point(-kPi + 2.0 * kPi * (static_cast<double>(bin) + rng.uniform()) / sectors_);
  }
  const std::size_t band = bin / sectors_, sector = bin % sectors_;
  const double z = -1.0 + 2.0 * (static_cast<double>(band) + rng.uniform()) / bands_;
  const double lon = -kPi + 2.0 * kPi * (static_cast<double>(sector) + rng.uniform()) / sectors_;
  return sphere_point(z, lon);
}

ProjectivePoint FiberHistogram::sample(StreamRng& rng) const {
  if (total_ == 0) return uniform_fiber_point(type_, rng);
  const double u = rng.uniform() * static_cast<double>(total_);
  std::size_t acc = 0, bin = 0;
  for (; bin + 1 < counts_.size(); ++bin) {
    acc += counts_[bin];
    if (u < static_cast<double>(acc)) break;
  }
  return point_in_bin(bin, rng);
}

double FiberHistogram::chi_square_uniform() const {
  const double expected = static_cast<double>(total_) / counts_.size();
  double chi2 = 0.0;
  for (std::size_t c : counts_) chi2 += (c - expected) * (c - expected) / expected;
  return chi2;
}

ProjectivePoint uniform_fiber_point(FiberType type, StreamRng& rng) {
  if (type == FiberType::circle) return circle_point(-kPi + 2.0 * kPi * rng.uniform());
  const double z = -1.0 + 2.0 * rng.uniform();
  return sphere_point(z, -kPi + 2.0 * kPi * rng.uniform());
}

// ---------------------------------------------------------------------------
// Lyapunov exponent

EstimatorReport lyapunov_exponent(const SuspensionFoliation& f, double horizon, std::size_t N, std::uint64_t seed,
                                  const EstimatorOptions& opt) {
  if (N < 64) throw ParameterError("lyapunov estimate needs N >= 64");
  if (!(horizon >= 10.0)) throw ParameterError("lyapunov estimate needs horizon >= 10");
  plan_steps(horizon, opt.step);
  const auto t0 = std::chrono::steady_clock::now();
  const SurfaceGroup& g = f.base();

  // Pilot: fiber law after a burn-in of horizon / 2 from uniform starts.
  const std::size_t pilot = std::max<std::size_t>(16, N / 4);
  std::vector<ProjectivePoint> pilot_end(pilot);
  parallel_for(pilot, opt.threads, [&](std::size_t i) {
    StreamRng rng(seed, StreamTag::pilot, i);
    const HPoint z = sample_domain_point(g, rng);
    const ProjectivePoint v = uniform_fiber_point(f.fiber_type(), rng);
    pilot_end[i] = run_walker(f, z, v, 0.5 * horizon, opt.step, rng, opt.generator).fiber_point;
  });
  FiberHistogram hist(f.fiber_type(), opt.pilot_bins);
  for (const auto& p : pilot_end) hist.add(p);

  std::vector<double> vals(N);
  parallel_for(N, opt.threads, [&](std::size_t i) {
    StreamRng start_rng(seed, StreamTag::start, i);
    StreamRng fiber_rng(seed, StreamTag::fiber, i);
    StreamRng path_rng(seed, StreamTag::path, i);
    const HPoint z = sample_domain_point(g, start_rng);
    const ProjectivePoint v = hist.sample(fiber_rng);
    const HolonomyState s = run_walker(f, z, v, horizon, opt.step, path_rng, opt.generator);
    vals[i] = (opt.affine_chart ? s.log_deriv_affine : s.log_deriv) / horizon;
  });
  const MeanStats m = mean_stats(vals);
  EstimatorReport rep{"lyapunov", m.mean, m.std_error, N, horizon, opt.step, seed, seconds_since(t0), {}};
  if (!std::isfinite(m.mean)) rep.warnings.push_back("non-finite log-derivative (affine chart blow-up?)");
  return rep;
}

// ---------------------------------------------------------------------------
// Entropy

EntropyReport kaimanovich_entropy(const SuspensionFoliation& f, double horizon, std::size_t N, std::uint64_t seed,
                                  const EstimatorOptions& opt) {
  if (!f.leaves_simply_connected()) {
    throw ParameterError("entropy estimator needs simply connected leaves; preset '" + f.name() + "' has none");
  }
  if (N < 2) throw ParameterError("entropy estimate needs N >= 2");
  if (!(horizon > 0.0)) throw ParameterError("entropy estimate needs horizon > 0");
  const double half = 0.5 * horizon;
  const StepPlan plan = plan_steps(half, opt.step);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<double> incr(N), plain(N);
  parallel_for(N, opt.threads, [&](std::size_t i) {
    StreamRng start_rng(seed, StreamTag::start, i);
    StreamRng rng(seed, StreamTag::path, i);
    const HPoint start = sample_domain_point(f.base(), start_rng);
    Complex z = start.coord();
    auto run = [&] {
      for (std::size_t k = 0; k < plan.count; ++k) {
        const double h = k + 1 == plan.count ? plan.last : opt.step;
        z = apply_increment(z, draw_increment(rng, h, opt.generator));
      }
      return hyperbolic_distance(start, HPoint::half_plane(z));
    };
    const double r_half = run();
    const double r_end = run();
    const double lp_half = log_heat_kernel(kernel_time(half, opt.generator), r_half);
    const double lp_end = log_heat_kernel(kernel_time(horizon, opt.generator), r_end);
    incr[i] = (lp_half - lp_end) / half;
    plain[i] = -lp_end / horizon;
  });
  const MeanStats m = mean_stats(incr);
  const MeanStats p = mean_stats(plain);
  EntropyReport out;
  out.estimate = {"entropy", m.mean, m.std_error, N, horizon, opt.step, seed, seconds_since(t0), {}};
  out.pointwise = p.mean;
  out.pointwise_std_error = p.std_error;
  if (horizon < 20.0) {
    out.estimate.warnings.push_back("horizon < 20: finite-time bias of the entropy estimate is not negligible");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Harmonic measure

FiberHistogram harmonic_measure(const SuspensionFoliation& f, double horizon, std::size_t N, std::size_t bins,
                                std::uint64_t seed, const EstimatorOptions& opt) {
  if (bins < 16) throw ParameterError("harmonic measure needs at least 16 bins");
  if (N < 1) throw ParameterError("harmonic measure needs N >= 1");
  std::vector<ProjectivePoint> ends(N);
  parallel_for(N, opt.threads, [&](std::size_t i) {
    StreamRng start_rng(seed, StreamTag::start, i);
    StreamRng fiber_rng(seed, StreamTag::fiber, i);
    StreamRng path_rng(seed, StreamTag::path, i);
    const HPoint z = sample_domain_point(f.base(), start_rng);
    const ProjectivePoint v = uniform_fiber_point(f.fiber_type(), fiber_rng);
    ends[i] = horizon > 0.0 ? run_walker(f, z, v, horizon, opt.step, path_rng, opt.generator).fiber_point : v;
  });
  FiberHistogram hist(f.fiber_type(), bins);
  for (const auto& p : ends) hist.add(p);
  return hist;
}

// ---------------------------------------------------------------------------
// Local dimension

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ParameterError("line fit needs two or more matching points");
  const double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("line fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

std::vector<double> geometric_radii(double hi, double lo, std::size_t n) {
  if (!(hi > lo && lo > 0.0) || n < 2) throw ParameterError("radii grid needs hi > lo > 0 and n >= 2");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = hi * std::pow(lo / hi, static_cast<double>(k) / (n - 1));
  return out;
}

LocalDimensionReport local_dimension(const std::vector<ProjectivePoint>& points, const std::vector<double>& radii,
                                     std::size_t max_centers) {
  if (points.size() < 1000) throw ParameterError("local dimension needs at least 1000 samples");
  if (radii.size() < 2) throw ParameterError("local dimension needs at least two radii");
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) {
    throw ParameterError("local dimension radii must be positive and span two decades");
  }
  const std::size_t n = points.size();
  const std::size_t centers = std::min(max_centers, n);
  std::vector<std::array<double, 3>> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = points[i].sphere();

  LocalDimensionReport rep;
  rep.centers = centers;
  std::vector<double> lx, ly;
  for (double r : radii) {
    std::vector<double> logs;
    const double r2 = r * r;
    for (std::size_t c = 0; c < centers; ++c) {
      const std::size_t ic = c * n / centers;
      std::size_t count = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == ic) continue;
        const double dx = xs[j][0] - xs[ic][0], dy = xs[j][1] - xs[ic][1], dz = xs[j][2] - xs[ic][2];
        if (dx * dx + dy * dy + dz * dz <= r2) ++count;
      }
      if (count > 0) logs.push_back(std::log(static_cast<double>(count) / (n - 1)));
    }
    // Radii where most balls are empty say nothing about the scaling.
    if (logs.size() * 2 < centers) continue;
    rep.radii.push_back(r);
    rep.mean_log_mass.push_back(pairwise_sum(logs) / logs.size());
    lx.push_back(std::log(r));
    ly.push_back(rep.mean_log_mass.back());
  }
  if (lx.size() < 2) {
    rep.low_confidence = true;
    return rep;
  }
  const LinearFit fit = fit_line(lx, ly);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.r_squared = fit.r_squared;
  rep.low_confidence = fit.r_squared < 0.9 || lx.size() < radii.size() / 2;
  return rep;
}

}  // namespace lamina
