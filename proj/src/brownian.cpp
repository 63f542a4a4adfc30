#include "lamina/brownian.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "lamina/errors.hpp"
#include "lamina/parallel.hpp"

namespace lamina {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_step(double horizon, double step) {
  if (!(step > 0.0) || step > 0.1) {
    throw ParameterError("step must lie in (0, 0.1], got " + std::to_string(step));
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw ParameterError("horizon must be finite and nonnegative, got " + std::to_string(horizon));
  }
}

// log sinh(x) for x > 0 without overflow.
double log_sinh(double x) {
  if (x > 1.0) return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
  return std::log(std::sinh(x));
}

}  // namespace

PathIncrement draw_increment(StreamRng& rng, double h, Generator gen) {
  // The half-Laplacian runs the same diffusion at half speed.
  const double he = gen == Generator::laplacian ? h : 0.5 * h;
  const double dv = -he + std::sqrt(2.0 * he) * rng.normal();
  const double du = std::sqrt(he * (1.0 + std::exp(2.0 * dv))) * rng.normal();
  return {du, dv};
}

Complex apply_increment(Complex z, const PathIncrement& inc) {
  const double y = z.imag();
  return {z.real() + y * inc.horizontal, y * std::exp(inc.log_vertical)};
}

StepPlan plan_steps(double horizon, double step) {
  check_step(horizon, step);
  if (horizon == 0.0) return {};
  const double ratio = horizon / step;
  auto full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  double rem = horizon - static_cast<double>(full) * step;
  if (rem <= 1e-12 * horizon) return {full, step};
  return {full + 1, rem};
}

BrownianPath simulate_path(const HPoint& start, double horizon, double step, std::uint64_t seed,
                           std::uint64_t stream, Generator gen) {
  const StepPlan plan = plan_steps(horizon, step);
  BrownianPath path;
  path.step = step;
  path.horizon = horizon;
  path.rng_stream_id = stream;
  path.samples.reserve(plan.count + 1);
  path.increments.reserve(plan.count);
  path.times.reserve(plan.count + 1);
  path.samples.push_back(to_half_plane(start));
  path.times.push_back(0.0);

  StreamRng rng(seed, StreamTag::path, stream);
  Complex z = path.samples.front().coord();
  for (std::size_t k = 0; k < plan.count; ++k) {
    const double h = k + 1 == plan.count ? plan.last : step;
    const PathIncrement inc = draw_increment(rng, h, gen);
    z = apply_increment(z, inc);
    path.increments.push_back(inc);
    path.samples.push_back(HPoint::half_plane(z));
    path.times.push_back(k + 1 == plan.count ? horizon : static_cast<double>(k + 1) * step);
  }
  return path;
}

HPoint simulate_endpoint(const HPoint& start, double horizon, double step, std::uint64_t seed,
                         std::uint64_t stream, Generator gen) {
  const StepPlan plan = plan_steps(horizon, step);
  StreamRng rng(seed, StreamTag::path, stream);
  Complex z = to_half_plane(start).coord();
  for (std::size_t k = 0; k < plan.count; ++k) {
    const double h = k + 1 == plan.count ? plan.last : step;
    z = apply_increment(z, draw_increment(rng, h, gen));
  }
  return HPoint::half_plane(z);
}

// ---------------------------------------------------------------------------
// Heat kernel

double log_heat_kernel(double t, double r) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("heat kernel needs t > 0");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("heat kernel needs r >= 0");

  // Substituting s = r + w^2 removes the inverse square-root singularity at
  // s = r. The factors e^{-r^2/4t} and e^{-r/2} are pulled out so that the
  // integrand stays O(1) for large r and t.
  auto f = [t, r](double w) {
    const double v = w * w;
    if (v == 0.0) return r > 0.0 ? 2.0 * r * std::sqrt(2.0 / -std::expm1(-2.0 * r)) : 0.0;
    const double log_den = 0.5 * (std::log(-std::expm1(-2.0 * r - v)) + log_sinh(0.5 * v));
    const double expo = -(2.0 * r * v + v * v) / (4.0 * t) - 0.25 * v;
    return (r + v) * 2.0 * w * std::exp(expo - log_den);
  };
  // Truncate where the Gaussian factor has fallen below e^{-50}.
  const double b = 2.0 * r + t;
  const double v_max = 0.5 * (-b + std::sqrt(b * b + 800.0 * t));
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, std::sqrt(v_max), 15, 1e-13, &err);
  if (!(integral > 0.0) || !std::isfinite(integral) || err > 1e-8 * integral) {
    throw NumericalError("heat-kernel quadrature failed at t = " + std::to_string(t) + ", r = " +
                         std::to_string(r) + " (integral " + std::to_string(integral) + ", error estimate " +
                         std::to_string(err) + ")");
  }
  return 0.5 * std::numbers::ln2 - 0.25 * t - 1.5 * std::log(4.0 * std::numbers::pi * t) - r * r / (4.0 * t) -
         0.5 * r + std::log(integral);
}

double heat_kernel(const HeatKernelQuery& q) { return std::exp(log_heat_kernel(q.t, q.r)); }

double heat_kernel_mass(double t) {
  if (!(t > 0.0)) throw ParameterError("heat kernel mass needs t > 0");
  auto density = [t](double r) {
    return r <= 0.0 ? 0.0 : 2.0 * std::numbers::pi * std::sinh(r) * std::exp(log_heat_kernel(t, r));
  };
  // The radial law concentrates near r = 2t with spread 2 sqrt(t).
  const double r_max = 2.0 * t + 16.0 * std::sqrt(t) + 4.0;
  double err = 0.0;
  const double m =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(density, 0.0, r_max, 15, 1e-12, &err);
  if (!std::isfinite(m)) throw NumericalError("heat kernel mass did not converge");
  return m;
}

RadialLaw::RadialLaw(double t, double r_max, std::size_t intervals)
    : t_(t), r_max_(r_max), h_(r_max / static_cast<double>(intervals)), cdf_(intervals + 1, 0.0) {
  if (!(r_max > 0.0) || intervals < 2) throw ParameterError("radial law needs r_max > 0 and a grid");
  auto density = [t](double r) {
    return r == 0.0 ? 0.0 : 2.0 * std::numbers::pi * std::sinh(r) * std::exp(log_heat_kernel(t, r));
  };
  // Simpson on each grid cell with its midpoint.
  double acc = 0.0, left = density(0.0);
  for (std::size_t k = 0; k < intervals; ++k) {
    const double a = h_ * static_cast<double>(k);
    const double right = density(a + h_);
    acc += h_ / 6.0 * (left + 4.0 * density(a + 0.5 * h_) + right);
    cdf_[k + 1] = acc;
    left = right;
  }
}

double RadialLaw::cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= r_max_) return 1.0;
  const double x = r / h_;
  const auto k = static_cast<std::size_t>(x);
  const double w = x - static_cast<double>(k);
  return (1.0 - w) * cdf_[k] + w * cdf_[k + 1];
}

double ks_distance(std::vector<double> samples, const RadialLaw& law) {
  if (samples.empty()) throw ParameterError("KS distance needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = law.cdf(samples[i]);
    d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
  }
  return d;
}

RadialKsReport heat_kernel_ks_check(double t, std::size_t N, double step, std::uint64_t seed, int threads) {
  if (!(t > 0.0)) throw ParameterError("KS check needs t > 0");
  if (N < 1) throw ParameterError("KS check needs N >= 1");
  const HPoint start = HPoint::half_plane({0.0, 1.0});
  std::vector<double> r(N);
  parallel_for(N, threads, [&](std::size_t i) {
    r[i] = hyperbolic_distance(start, simulate_endpoint(start, t, step, seed, i));
  });
  // The density is negligible beyond 2t + 12 sqrt(t) for these times.
  const RadialLaw law(t, std::max(*std::max_element(r.begin(), r.end()), 2.0 * t + 12.0 * std::sqrt(t)));
  return {t, ks_distance(std::move(r), law), N, step, seed};
}

// ---------------------------------------------------------------------------
// Estimators

EstimatorReport drift_estimate(std::size_t N, double horizon, double step, std::uint64_t seed, int threads,
                               Generator gen, const HPoint& start) {
  if (N < 100) throw ParameterError("drift estimate needs N >= 100");
  plan_steps(horizon, step);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> vals(N);
  parallel_for(N, threads, [&](std::size_t i) {
    const HPoint end = simulate_endpoint(start, horizon, step, seed, i, gen);
    const double d = hyperbolic_distance(to_half_plane(start), end);
    vals[i] = horizon > 0.0 ? d / horizon : d;
  });
  const MeanStats s = mean_stats(vals);
  EstimatorReport rep{"drift", s.mean, s.std_error, N, horizon, step, seed, seconds_since(t0), {}};
  if (horizon == 0.0) rep.warnings.push_back("horizon 0: value is the raw distance");
  return rep;
}

namespace {

// log phi of the disc image of a half-plane point. With w = (z - i)/(z + i)
// one has 1 - |w|^2 = 4y/|z+i|^2 and |1 - w|^2 = 4/|z+i|^2, which keeps
// full precision however close w is to the circle.
double log_phi_of_disc_image(Complex z) {
  const double n = std::norm(z + Complex{0.0, 1.0});
  return std::log(4.0 * z.imag() / n) - std::log(4.0 / n);
}

}  // namespace

EstimatorReport dynkin_check(double t, std::size_t N, std::uint64_t seed, double step, int threads) {
  if (!(t >= 0.5 && t <= 20.0)) throw ParameterError("dynkin check needs t in [0.5, 20]");
  if (N < 2) throw ParameterError("dynkin check needs N >= 2");
  const auto t0 = std::chrono::steady_clock::now();
  const HPoint origin = cayley(HPoint::disc(0.0));
  std::vector<double> vals(N);
  parallel_for(N, threads, [&](std::size_t i) {
    const HPoint end = simulate_endpoint(origin, t, step, seed, i);
    vals[i] = log_phi_of_disc_image(end.coord()) / t;
  });
  const MeanStats s = mean_stats(vals);
  return {"dynkin", s.mean, s.std_error, N, t, step, seed, seconds_since(t0), {}};
}

double circle_mean_logphi(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw ParameterError("circle mean needs 0 <= r < 1");
  constexpr int M = 4096;
  std::vector<double> vals(M);
  for (int k = 0; k < M; ++k) {
    const double th = 2.0 * std::numbers::pi * k / M;
    vals[k] = log_phi(HPoint::disc(std::polar(r, th)));
  }
  return pairwise_sum(vals) / M;
}

}  // namespace lamina
