#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lamina/errors.hpp"
#include "lamina/estimators.hpp"

using namespace lamina;
using doctest::Approx;

TEST_CASE("histogram bins have equal area") {
  for (FiberType t : {FiberType::circle, FiberType::sphere}) {
    FiberHistogram h(t, 64);
    CHECK(h.bins() == 64);
    for (std::uint64_t k = 0; k < 64000; ++k) {
      StreamRng rng(4, StreamTag::sample, k);
      h.add(uniform_fiber_point(t, rng));
    }
    // 1% critical value of chi-square with 63 degrees of freedom.
    CHECK(h.chi_square_uniform() < 92.0);
  }
  FiberHistogram s(FiberType::sphere, 64);
  CHECK(s.bands() * s.sectors() == 64);
  CHECK_THROWS_AS(FiberHistogram(FiberType::sphere, 0), ParameterError);
}

TEST_CASE("histogram sampling lands in the chosen bin") {
  FiberHistogram h(FiberType::sphere, 32);
  const ProjectivePoint p = ProjectivePoint::from_complex({0.4, 0.2});
  for (int k = 0; k < 10; ++k) h.add(p);
  for (std::uint64_t k = 0; k < 100; ++k) {
    StreamRng rng(1, StreamTag::pilot, k);
    CHECK(h.bin_of(h.sample(rng)) == h.bin_of(p));
  }
}

TEST_CASE("Lyapunov exponents") {
  const EstimatorReport triv = lyapunov_exponent(trivial_suspension(), 10.0, 64, 1);
  CHECK(triv.value == 0.0);
  CHECK(triv.std_error == 0.0);

  const EstimatorReport fu = lyapunov_exponent(fuchsian_boundary(), 50.0, 2048, 1);
  CHECK(fu.value == Approx(-1.0).epsilon(0.05));
  CHECK(fu.samples == 2048);

  // The Schottky holonomy contracts, but more slowly than the boundary
  // action; only sign and the -1/2 floor are asserted.
  const EstimatorReport sc = lyapunov_exponent(schottky(4, 1), 50.0, 1024, 1);
  CHECK(sc.value < 0.0);
  CHECK(sc.value <= -0.5);
  MESSAGE("schottky(4,1) exponent " << sc.value << " +- " << sc.std_error);

  CHECK_THROWS_AS(lyapunov_exponent(fuchsian_boundary(), 5.0, 64, 1), ParameterError);
  CHECK_THROWS_AS(lyapunov_exponent(fuchsian_boundary(), 10.0, 10, 1), ParameterError);
}

TEST_CASE("the affine chart gives the same exponent") {
  EstimatorOptions a;
  a.affine_chart = true;
  const double round = lyapunov_exponent(fuchsian_boundary(), 20.0, 256, 3).value;
  const double affine = lyapunov_exponent(fuchsian_boundary(), 20.0, 256, 3, a).value;
  CHECK(std::abs(round - affine) < 0.1);
}

TEST_CASE("heat-kernel entropy") {
  const EntropyReport e = kaimanovich_entropy(fuchsian_boundary(), 50.0, 2048, 1);
  CHECK(e.estimate.value == Approx(1.0).epsilon(0.05));
  CHECK(e.estimate.warnings.empty());

  EstimatorOptions half;
  half.generator = Generator::half_laplacian;
  const EntropyReport h = kaimanovich_entropy(fuchsian_boundary(), 50.0, 2048, 1, half);
  CHECK(std::abs(h.estimate.value - 0.5) < 0.05);

  const EntropyReport s = kaimanovich_entropy(fuchsian_boundary(), 5.0, 256, 1);
  CHECK(!s.estimate.warnings.empty());

  CHECK_THROWS_AS(kaimanovich_entropy(schottky(4, 1), 50.0, 256, 1), ParameterError);
}

TEST_CASE("harmonic measure of the trivial suspension is uniform") {
  const FiberHistogram h = harmonic_measure(trivial_suspension(), 2.0, 6400, 64, 2);
  CHECK(h.total() == 6400);
  CHECK(h.chi_square_uniform() < 92.0);
}

TEST_CASE("harmonic measure of the boundary action has full support") {
  const FiberHistogram h = harmonic_measure(fuchsian_boundary(), 5.0, 10000, 64, 2);
  for (std::size_t c : h.counts()) CHECK(c > 0);
}

TEST_CASE("Schottky harmonic measure sits inside the ping-pong circles") {
  const SuspensionFoliation s = schottky(4, 1);
  // Paths whose reduced holonomy word is still short leave the fiber point
  // near its uniform start; by t = 50 almost none remain.
  const FiberHistogram h = harmonic_measure(s, 50.0, 1000, 64, 2);
  std::size_t inside = 0;
  for (const auto& p : h.points) {
    const Complex z = p.affine();
    for (const Circle& c : s.circles()) {
      if (std::abs(z - c.center) <= c.radius) {
        ++inside;
        break;
      }
    }
  }
  CHECK(static_cast<double>(inside) > 0.99 * static_cast<double>(h.points.size()));
}

TEST_CASE("local dimension of uniform measures") {
  std::vector<ProjectivePoint> circle, sphere;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    StreamRng rng(6, StreamTag::sample, k);
    if (k < 20000) circle.push_back(uniform_fiber_point(FiberType::circle, rng));
    sphere.push_back(uniform_fiber_point(FiberType::sphere, rng));
  }
  CHECK(local_dimension(circle, geometric_radii(0.3, 3e-3, 9)).slope == Approx(1.0).epsilon(0.1));
  CHECK(local_dimension(sphere, geometric_radii(1.0, 1e-2, 7)).slope == Approx(2.0).epsilon(0.1));
  CHECK_THROWS_AS(local_dimension(std::vector<ProjectivePoint>(10), geometric_radii(0.3, 3e-3, 9)), ParameterError);
  CHECK_THROWS_AS(local_dimension(circle, geometric_radii(0.3, 0.1, 9)), ParameterError);
}

TEST_CASE("line fits and radius grids") {
  const LinearFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r_squared == Approx(1.0));
  const auto r = geometric_radii(1.0, 1e-2, 3);
  REQUIRE(r.size() == 3);
  CHECK(r[1] == Approx(0.1));
}
