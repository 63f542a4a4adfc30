#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lamina/errors.hpp"
#include "lamina/hyperbolic.hpp"

using namespace lamina;
using doctest::Approx;

namespace {

// Round-metric derivative by central differences in the affine chart.
double fd_spherical_derivative(const MoebiusMap& g, Complex z) {
  const double h = 1e-6;
  const Complex w = g.apply(z);
  const double dw = std::abs(g.apply(z + h) - g.apply(z - h)) / (2 * h);
  return dw * (1 + std::norm(z)) / (1 + std::norm(w));
}

}  // namespace

TEST_CASE("mobius_apply on the half-plane") {
  const HPoint i = HPoint::half_plane({0, 1});
  CHECK(std::abs(mobius_apply(MoebiusMap::identity(), i).coord() - Complex(0, 1)) < 1e-15);
  CHECK(std::abs(mobius_apply(MoebiusMap::real(1, 1, 0, 1), i).coord() - Complex(1, 1)) < 1e-15);
  const HPoint w = mobius_apply(MoebiusMap::real(0, -1, 1, 0), HPoint::half_plane({0, 2}));
  CHECK(std::abs(w.coord() - Complex(0, 0.5)) < 1e-15);
}

TEST_CASE("degenerate matrices are rejected") {
  CHECK_THROWS_AS(MoebiusMap(1, 2, 2, 4), DegenerateMapError);
  CHECK_THROWS_AS(MoebiusMap(0, 0, 0, 0), DegenerateMapError);
}

TEST_CASE("composition and inverse") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 100; ++k) {
    const MoebiusMap g({n(gen), n(gen)}, {n(gen), n(gen)}, {n(gen), n(gen)}, {n(gen), n(gen)});
    const MoebiusMap h({n(gen), n(gen)}, {n(gen), n(gen)}, {n(gen), n(gen)}, {n(gen), n(gen)});
    const Complex z(n(gen), n(gen));
    CHECK(std::abs((g * h).apply(z) - g.apply(h.apply(z))) < 1e-8 * (1 + std::abs(g.apply(h.apply(z)))));
    CHECK((g * g.inverse()).distance_to_identity() < 1e-10);
    CHECK(std::abs(g.det() - 1.0) < 1e-12);
  }
}

TEST_CASE("long products stay normalized") {
  MoebiusMap g = MoebiusMap::identity();
  const MoebiusMap step = MoebiusMap::real(2, 1, 1, 1);
  for (int k = 0; k < 200; ++k) g = g * step * step.inverse();
  CHECK(g.distance_to_identity() < 1e-9);
  CHECK(std::abs(g.det() - 1.0) < 1e-12);
}

TEST_CASE("spherical derivative") {
  const ProjectivePoint zero = ProjectivePoint::from_complex(0);
  CHECK(mobius_derivative_spherical(MoebiusMap::identity(), ProjectivePoint::from_complex({0.3, -2})) ==
        Approx(1.0).epsilon(1e-14));

  // diag(2, 1/2) is z -> 4z: it expands at the fixed point 0 and contracts
  // at the fixed point infinity.
  const MoebiusMap d(2.0, 0.0, 0.0, 0.5);
  CHECK(mobius_derivative_spherical(d, zero) == Approx(4.0).epsilon(1e-14));
  CHECK(mobius_derivative_spherical(d, ProjectivePoint::infinity()) == Approx(0.25).epsilon(1e-14));
  CHECK(fd_spherical_derivative(d, 0.0) == Approx(4.0).epsilon(1e-8));

  // Rotations are round isometries.
  const double th = 0.7;
  const MoebiusMap rot(std::polar(1.0, th / 2), 0.0, 0.0, std::polar(1.0, -th / 2));
  for (double a : {0.0, 1.0, 2.5}) {
    CHECK(mobius_derivative_spherical(rot, ProjectivePoint::from_complex(std::polar(1.0, a))) ==
          Approx(1.0).epsilon(1e-14));
  }

  std::mt19937_64 gen(9);
  std::normal_distribution<double> n;
  for (int k = 0; k < 50; ++k) {
    const MoebiusMap g({n(gen), n(gen)}, {n(gen), n(gen)}, {n(gen), n(gen)}, {n(gen), n(gen)});
    const Complex z(n(gen), n(gen));
    const ProjectivePoint p = ProjectivePoint::from_complex(z);
    CHECK(mobius_derivative_spherical(g, p) == Approx(fd_spherical_derivative(g, z)).epsilon(1e-5));
    CHECK(log_mobius_derivative_spherical(g, p) == Approx(std::log(mobius_derivative_spherical(g, p))));
  }
}

TEST_CASE("spherical derivative at a pole") {
  // z -> 1/z maps 0 to infinity with unit round derivative.
  const MoebiusMap inv(0.0, 1.0, 1.0, 0.0);
  CHECK(mobius_derivative_spherical(inv, ProjectivePoint::from_complex(0)) == Approx(1.0));
  CHECK(mobius_derivative_spherical(inv, ProjectivePoint::infinity()) == Approx(1.0));
}

TEST_CASE("hyperbolic distance") {
  const HPoint i = HPoint::half_plane({0, 1});
  CHECK(hyperbolic_distance(i, i) == 0.0);
  CHECK(hyperbolic_distance(i, HPoint::half_plane({0, std::numbers::e})) == Approx(1.0).epsilon(1e-14));
  for (double r : {0.1, 0.5, 0.9, 0.999}) {
    // Midpoint-rule integral of 2 / (1 - s^2) along the radius.
    const int n = 200000;
    double len = 0;
    for (int k = 0; k < n; ++k) {
      const double s = (k + 0.5) * r / n;
      len += 2.0 / (1 - s * s) * r / n;
    }
    const double d = hyperbolic_distance(HPoint::disc(0), HPoint::disc(r));
    CHECK(d == Approx(2 * std::atanh(r)).epsilon(1e-13));
    CHECK(d == Approx(len).epsilon(1e-6));
  }
  // Model independence and isometry invariance.
  const HPoint a = HPoint::half_plane({0.3, 0.2}), b = HPoint::half_plane({-1.5, 2.0});
  CHECK(hyperbolic_distance(to_disc(a), to_disc(b)) == Approx(hyperbolic_distance(a, b)).epsilon(1e-12));
  const MoebiusMap g = MoebiusMap::real(2, 1, 3, 2);
  CHECK(hyperbolic_distance(mobius_apply(g, a), mobius_apply(g, b)) ==
        Approx(hyperbolic_distance(a, b)).epsilon(1e-12));
}

TEST_CASE("Cayley transforms") {
  const HPoint z = HPoint::half_plane({0.4, 1.7});
  const HPoint back = to_half_plane(to_disc(z));
  CHECK(std::abs(back.coord() - z.coord()) < 1e-14);
  CHECK(std::abs(to_disc(HPoint::half_plane({0, 1})).coord()) < 1e-16);
  CHECK(to_disc(BoundaryPoint::half_plane_infinity()).coord() == Complex(1, 0));
  const BoundaryPoint xi = to_half_plane(BoundaryPoint::disc(std::polar(1.0, 2.0)));
  CHECK(std::abs(to_disc(xi).coord() - std::polar(1.0, 2.0)) < 1e-14);
  CHECK(to_half_plane(BoundaryPoint::disc(1.0)).is_infinity());
}

TEST_CASE("boundary points are validated") {
  CHECK_THROWS_AS(BoundaryPoint::disc(0.5), ParameterError);
  CHECK_THROWS_AS(HPoint::disc(1.0), ParameterError);
  CHECK_THROWS_AS(HPoint::half_plane({0, -1}), ParameterError);
}

TEST_CASE("Busemann functions") {
  const HPoint i = HPoint::half_plane({0, 1});
  CHECK(busemann(BoundaryPoint::half_plane_infinity(), i, i) == 0.0);
  CHECK(busemann(BoundaryPoint::half_plane_infinity(), i, HPoint::half_plane({0, std::numbers::e})) ==
        Approx(1.0).epsilon(1e-14));

  // Disc, xi = 1, x = 0: B equals log phi(y).
  const BoundaryPoint one = BoundaryPoint::disc(1.0);
  for (Complex y : {Complex(0.3, 0.1), Complex(-0.7, 0.2), Complex(0.0, -0.95)}) {
    const double phi = (1 - std::norm(y)) / std::norm(1.0 - y);
    CHECK(busemann(one, HPoint::disc(0), HPoint::disc(y)) == Approx(std::log(phi)).epsilon(1e-12));
    CHECK(log_phi(HPoint::disc(y)) == Approx(std::log(phi)).epsilon(1e-12));
  }

  // Limit definition: d(x, z) - d(y, z) with z far along the ray to xi.
  const BoundaryPoint xi = BoundaryPoint::half_plane(0.8);
  const HPoint x = HPoint::half_plane({0.1, 0.5}), y = HPoint::half_plane({-0.4, 1.3});
  const HPoint far = HPoint::half_plane({0.8, 1e-7});
  CHECK(hyperbolic_distance(x, far) - hyperbolic_distance(y, far) == Approx(busemann(xi, x, y)).epsilon(1e-6));
}

TEST_CASE("geodesic rays have unit speed") {
  for (const BoundaryPoint& xi : {BoundaryPoint::half_plane(0.7), BoundaryPoint::half_plane(-3.0),
                                  BoundaryPoint::half_plane_infinity()}) {
    const GeodesicRay ray(HPoint::half_plane({0.2, 0.9}), xi);
    for (double s : {0.0, 0.5, 3.0, 12.0}) {
      CHECK(hyperbolic_distance(ray.start(), ray.at(s)) == Approx(s).epsilon(1e-10));
    }
  }
}

TEST_CASE("projective points and chordal distance") {
  const ProjectivePoint a = ProjectivePoint::from_complex(0), b = ProjectivePoint::infinity();
  CHECK(chordal_distance(a, b) == Approx(2.0));
  CHECK(chordal_distance(a, a) == Approx(0.0));
  const ProjectivePoint p = ProjectivePoint::from_complex({0.3, -1.2});
  const auto x = p.sphere();
  CHECK(std::hypot(x[0], x[1], x[2]) == Approx(1.0));
  CHECK(chordal_distance(ProjectivePoint::from_sphere(x), p) < 1e-14);
  const ProjectivePoint q = ProjectivePoint::from_complex({-2.0, 0.5});
  const auto y = q.sphere();
  CHECK(chordal_distance(p, q) == Approx(std::hypot(x[0] - y[0], x[1] - y[1], x[2] - y[2])).epsilon(1e-13));
}
