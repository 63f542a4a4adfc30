#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lamina/dimension.hpp"
#include "lamina/errors.hpp"

using namespace lamina;
using doctest::Approx;

namespace {

// Circle through three points.
Circle circumcircle(Complex a, Complex b, Complex c) {
  const Complex ab = b - a, ac = c - a;
  const double d = 2.0 * (ab.real() * ac.imag() - ab.imag() * ac.real());
  const Complex o = a + Complex(ac.imag() * std::norm(ab) - ab.imag() * std::norm(ac),
                               ab.real() * std::norm(ac) - ac.real() * std::norm(ab)) / d;
  return {o, std::abs(a - o)};
}

}  // namespace

TEST_CASE("Fuchsian limit set fills the circle") {
  LimitSetOptions o;
  o.resolution = 1e-4;
  const LimitSetSample s = sample_limit_set(fuchsian_boundary().rep(), 10, ProjectivePoint::from_complex(0), o);
  std::vector<double> ang;
  for (const auto& p : s.points) {
    const auto x = p.sphere();
    CHECK(std::abs(x[1]) < 1e-9);  // on the real circle
    ang.push_back(std::atan2(x[2], x[0]));
  }
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + 2 * std::numbers::pi - ang.back();
  for (std::size_t k = 1; k < ang.size(); ++k) gap = std::max(gap, ang[k] - ang[k - 1]);
  CHECK(gap < 0.1);
}

TEST_CASE("Schottky limit set is inside the circles") {
  const SuspensionFoliation s = schottky(4, 1);
  const LimitSetSample ls = sample_limit_set(s.rep(), 10, ProjectivePoint::from_complex(0));
  CHECK(ls.points.size() > 100);
  for (const auto& p : ls.points) {
    const Complex z = p.affine();
    bool inside = false;
    for (const Circle& c : s.circles()) inside = inside || std::abs(z - c.center) <= c.radius * (1 + 1e-12);
    CHECK(inside);
  }
}

TEST_CASE("trivial limit set is a point") {
  const LimitSetSample s = sample_limit_set(trivial_suspension().rep(), 6, ProjectivePoint::from_complex(0.5));
  CHECK(s.points.size() == 1);
  CHECK_THROWS_AS(sample_limit_set(fuchsian_boundary().rep(), 15, {}), ParameterError);
}

TEST_CASE("box counting") {
  std::vector<ProjectivePoint> circle;
  for (int k = 0; k < 200000; ++k) circle.push_back(ProjectivePoint::from_complex(std::tan(std::numbers::pi * (k / 200000.0 - 0.5))));
  const DimensionReport c = box_counting(circle, geometric_radii(1e-1, 1e-3, 9));
  CHECK(c.box_dimension == Approx(1.0).epsilon(0.05));
  CHECK(!c.degenerate);

  const DimensionReport p = box_counting({ProjectivePoint::from_complex(0.2)}, geometric_radii(1e-1, 1e-3, 9));
  CHECK(p.box_dimension == Approx(0.0));
  CHECK(p.degenerate);
  CHECK_THROWS_AS(box_counting(circle, geometric_radii(1e-1, 1e-2, 9)), ParameterError);
  CHECK_THROWS_AS(box_counting(circle, geometric_radii(1e-1, 1e-3, 5)), ParameterError);
}

TEST_CASE("Moran equation") {
  CHECK(solve_moran({1.0 / 3, 1.0 / 3}) == Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-10));
  CHECK(solve_moran({0.5, 0.25, 0.25}) == Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(solve_moran({0.5}), ParameterError);
  CHECK_THROWS_AS(solve_moran({0.5, 1.5}), ParameterError);
  const MoranResult m = moran_dimension(ifs_from_ratios({1.0 / 3, 1.0 / 3}));
  CHECK(m.lower == Approx(m.dimension));
  CHECK(m.upper == Approx(m.dimension));
}

TEST_CASE("the generators form a two-map system") {
  const SuspensionFoliation s = schottky(4, 1);
  const IFSSystem ifs = build_holonomy_ifs(s, {2.0, 2.0}, 3.9, {{{0, false}}, {{2, false}}});
  CHECK(ifs.maps.size() == 2);
  CHECK(ifs.min_separation > 0.0);
  CHECK(recheck_ifs(ifs));
  // Stored images agree with circles through three boundary images.
  for (const IFSMap& m : ifs.maps) {
    const Circle c = circumcircle(m.map.apply(Complex(2, 2) + 3.9), m.map.apply(Complex(2, 2) + Complex(0, 3.9)),
                                  m.map.apply(Complex(2, 2) - 3.9));
    CHECK(std::abs(c.center - m.image.center) < 1e-10);
    CHECK(c.radius == Approx(m.image.radius).epsilon(1e-10));
  }
  CHECK_THROWS_AS(build_holonomy_ifs(trivial_suspension(), 0.0, 1.0, reduced_words(s.rep(), 2)), EmptySystemError);
}

TEST_CASE("word enumeration") {
  const FiberRepresentation rep = schottky(4, 1).rep();
  CHECK(reduced_words(rep, 1).size() == 4);
  CHECK(reduced_words(rep, 3).size() == 36);  // 4 * 3 * 3
  for (const Word& w : first_return_words(rep, {0, false}, 4)) {
    CHECK(w.back() == Letter{0, false});
    CHECK(w.front() != Letter{0, true});
    for (std::size_t k = 0; k + 1 < w.size(); ++k) CHECK(w[k] != Letter{0, false});
  }
}

TEST_CASE("Schottky Moran bracket contains the box-counting estimate") {
  for (double r : {1.0, 0.5}) {
    const SuspensionFoliation s = schottky(4, r);
    const Chart ch = schottky_chart(s);
    const IFSSystem ifs = build_holonomy_ifs(s, ch.center, ch.radius, first_return_words(s.rep(), {0, false}, 8));
    CHECK(recheck_ifs(ifs));
    const MoranResult m = moran_dimension(ifs);
    const PresetScales sc = preset_scales(s);
    LimitSetOptions o;
    o.resolution = sc.resolution;
    const double box =
        box_counting(sample_limit_set(s.rep(), 12, ProjectivePoint::from_complex(0), o).points, sc.box_radii)
            .box_dimension;
    CHECK(m.lower <= box);
    CHECK(box <= m.upper);
    CHECK(std::abs(box - m.dimension) < 0.1);
  }
}

TEST_CASE("dimension inequality check") {
  const InequalityReport r = check_dimension_inequality(0.3, 0.2, -1.0);
  CHECK(r.ratio == Approx(0.2));
  CHECK(r.margin == Approx(0.2));
  CHECK(r.pass);
  CHECK(!check_dimension_inequality(0.3, 1.0, -1.0).pass);
  CHECK_THROWS_AS(check_dimension_inequality(std::nullopt, 1.0, -1.0), DependencyError);
  CHECK_THROWS_AS(check_dimension_inequality(1.0, std::nullopt, -1.0), DependencyError);
  CHECK_THROWS_AS(check_dimension_inequality(1.0, 1.0, std::nullopt), DependencyError);
  CHECK_THROWS_AS(check_dimension_inequality(1.0, 1.0, 0.5), ParameterError);
}

TEST_CASE("inequality across shrinking Schottky discs") {
  InequalityParams p;
  p.horizon = 20;
  p.N = 256;
  p.harmonic_N = 1024;
  double previous = -1.0;
  for (double r : {1.0, 0.7, 0.5}) {
    const InequalityRun run = verify_dimension_inequality(schottky(4, r), p);
    MESSAGE("schottky(4," << r << "): d " << run.report.d_hat << ", h/|l| " << run.report.ratio << ", margin "
                          << run.report.margin);
    CHECK(run.report.pass);
    CHECK(run.box.box_dimension < 0.35);
    if (previous >= 0.0) CHECK(run.box.box_dimension < previous);
    previous = run.box.box_dimension;
  }
}
