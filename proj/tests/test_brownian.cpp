#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lamina/brownian.hpp"
#include "lamina/errors.hpp"
#include "lamina/parallel.hpp"

using namespace lamina;
using doctest::Approx;

namespace {

// Independent kernel oracle: composite Simpson on the defining integral
// after s = r + u^2, with cosh s - cosh r written as a product of sinh.
double kernel_oracle(double t, double r) {
  auto f = [&](double u) {
    if (u == 0.0) return r == 0.0 ? 0.0 : r * std::exp(-r * r / (4 * t)) * 2.0 / std::sqrt(std::sinh(r));
    const double s = r + u * u;
    const double den = 2.0 * std::sinh(0.5 * (s + r)) * std::sinh(0.5 * u * u);
    return s * std::exp(-s * s / (4 * t)) * 2.0 * u / std::sqrt(den);
  };
  const double U = std::sqrt(40.0 + 10.0 * t);
  const int n = 20000;
  double acc = 0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    acc += w * f(U * k / n);
  }
  acc *= U / n / 3.0;
  return std::sqrt(2.0) * std::exp(-t / 4) * std::pow(4 * std::numbers::pi * t, -1.5) * acc;
}

}  // namespace

TEST_CASE("heat kernel against a Simpson oracle") {
  for (double t : {0.5, 1.0, 3.0}) {
    for (double r : {0.0, 0.3, 1.0, 2.5, 6.0}) {
      CHECK(heat_kernel({t, r}) == Approx(kernel_oracle(t, r)).epsilon(1e-6));
    }
  }
}

TEST_CASE("heat kernel normalization") {
  for (double t : {0.5, 1.0, 2.0, 10.0}) CHECK(std::abs(heat_kernel_mass(t) - 1.0) < 1e-3);
  // Independent check: trapezoid in r with the volume element 2 pi sinh r.
  const double t = 1.0;
  double m = 0;
  const double h = 1e-3;
  for (double r = h; r < 20; r += h) m += 2 * std::numbers::pi * std::sinh(r) * heat_kernel({t, r}) * h;
  CHECK(std::abs(m - 1.0) < 1e-3);
}

TEST_CASE("heat kernel rejects bad arguments") {
  CHECK_THROWS_AS(heat_kernel({0.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(heat_kernel({1.0, -1.0}), ParameterError);
  CHECK(std::log(heat_kernel({2.0, 1.5})) == Approx(log_heat_kernel(2.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("Chapman-Kolmogorov at the origin") {
  // p(2t, 0) = int p(t, r)^2 dvol.
  const double t = 0.7;
  double acc = 0;
  const double h = 2e-3;
  for (double r = 0.5 * h; r < 25; r += h) {
    const double p = heat_kernel({t, r});
    acc += 2 * std::numbers::pi * std::sinh(r) * p * p * h;
  }
  CHECK(acc == Approx(heat_kernel({2 * t, 0.0})).epsilon(1e-2));
}

TEST_CASE("paths") {
  const HPoint o = HPoint::half_plane({0, 1});
  const BrownianPath p0 = simulate_path(o, 0.0, 1e-2, 1, 0);
  CHECK(p0.samples.size() == 1);
  CHECK(p0.increments.empty());

  const BrownianPath p = simulate_path(o, 1.005, 1e-2, 1, 3);
  CHECK(p.samples.size() == 102);
  CHECK(p.times.back() == Approx(1.005));
  // Replaying the increments reproduces the samples.
  Complex z = o.coord();
  for (std::size_t k = 0; k < p.increments.size(); ++k) {
    z = apply_increment(z, p.increments[k]);
    CHECK(std::abs(z - p.samples[k + 1].coord()) < 1e-12 * std::abs(z));
  }
  // Same key, same path.
  CHECK(simulate_endpoint(o, 1.005, 1e-2, 1, 3).coord() == p.samples.back().coord());

  CHECK_THROWS_AS(simulate_path(o, 1.0, 0.0, 1, 0), ParameterError);
  CHECK_THROWS_AS(simulate_path(o, 1.0, 0.2, 1, 0), ParameterError);
  CHECK_THROWS_AS(simulate_path(o, -1.0, 0.01, 1, 0), ParameterError);
}

TEST_CASE("log Im follows its exact Gaussian law") {
  const HPoint o = HPoint::half_plane({0, 1});
  const std::size_t N = 20000;
  std::vector<double> v(N);
  parallel_for(N, 0, [&](std::size_t i) { v[i] = std::log(simulate_endpoint(o, 5.0, 1e-1, 11, i).coord().imag()); });
  const MeanStats m = mean_stats(v);
  CHECK(std::abs(m.mean + 5.0) < 3 * m.std_error);
}

TEST_CASE("drift") {
  const EstimatorReport r = drift_estimate(4096, 50.0, 1e-2, 7);
  CHECK(r.value == Approx(1.0).epsilon(0.05));
  CHECK(r.samples == 4096);

  const EstimatorReport half = drift_estimate(2048, 50.0, 1e-2, 7, 0, Generator::half_laplacian);
  CHECK(std::abs(half.value - 0.5) < 0.05);

  CHECK(drift_estimate(100, 0.0, 1e-2, 7).value == 0.0);
  CHECK_THROWS_AS(drift_estimate(99, 1.0, 1e-2, 7), ParameterError);
}

TEST_CASE("drift is independent of the thread count") {
  const EstimatorReport a = drift_estimate(300, 3.0, 1e-2, 5, 1);
  const EstimatorReport b = drift_estimate(300, 3.0, 1e-2, 5, 4);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("Dynkin identity") {
  for (double t : {1.0, 10.0}) {
    const EstimatorReport r = dynkin_check(t, 10000, 3);
    CHECK(std::abs(r.value + 1.0) < 0.05);
  }
  CHECK_THROWS_AS(dynkin_check(0.1, 1000, 3), ParameterError);
}

TEST_CASE("log phi has Laplacian -1") {
  // Five-point stencil in the disc with the metric factor (1 - |z|^2)^2 / 4.
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0, 1);
  const double h = 1e-4;
  for (int k = 0; k < 100; ++k) {
    const Complex z = std::polar(0.9 * std::sqrt(u(gen)), 2 * std::numbers::pi * u(gen));
    auto f = [](Complex w) { return log_phi(HPoint::disc(w)); };
    const double lap = (f(z + h) + f(z - h) + f(z + Complex(0, h)) + f(z - Complex(0, h)) - 4 * f(z)) / (h * h);
    CHECK(std::pow(1 - std::norm(z), 2) / 4 * lap == Approx(-1.0).epsilon(1e-4));
  }
}

TEST_CASE("circle means of log phi") {
  CHECK(circle_mean_logphi(0.0) == Approx(0.0));
  CHECK(circle_mean_logphi(0.5) == Approx(std::log(0.75)).epsilon(1e-10));
  CHECK(circle_mean_logphi(0.9) == Approx(std::log(0.19)).epsilon(1e-10));
}

TEST_CASE("endpoint radial law matches the kernel") {
  const RadialKsReport r = heat_kernel_ks_check(1.0, 100000, 1e-3, 13);
  CHECK(r.ks < 0.05);
  // A wrong time is detected.
  std::vector<double> d(5000);
  parallel_for(d.size(), 0, [&](std::size_t i) {
    d[i] = hyperbolic_distance(HPoint::half_plane({0, 1}),
                               simulate_endpoint(HPoint::half_plane({0, 1}), 2.0, 1e-2, 13, i));
  });
  CHECK(ks_distance(d, RadialLaw(1.0, 30.0)) > 0.2);
}
