#pragma once

// Hyperbolic plane geometry in the disc and upper half-plane models.
//
// Curvature is -1 throughout: ds = 2|dz|/(1-|z|^2) in the disc and
// ds = |dz|/Im z in the half-plane. The half-plane is the canonical
// working model; the disc is used for radial and boundary formulas.

#include <array>
#include <complex>
#include <cstdint>

namespace lamina {

using Complex = std::complex<double>;

enum class Model { disc, half_plane };

const char* to_string(Model m);

/// A point of the hyperbolic plane in one of the two models.
class HPoint {
 public:
  static HPoint half_plane(Complex z);
  static HPoint disc(Complex z);

  Model model() const { return model_; }
  Complex coord() const { return z_; }

 private:
  HPoint(Model m, Complex z) : model_(m), z_(z) {}
  Model model_;
  Complex z_;
};

/// A point of the ideal boundary. In the half-plane model the boundary is
/// the real line plus the point at infinity.
class BoundaryPoint {
 public:
  /// Accepts |z| = 1 within 1e-12 and projects onto the circle.
  static BoundaryPoint disc(Complex z);
  static BoundaryPoint half_plane(double x);
  static BoundaryPoint half_plane_infinity();

  Model model() const { return model_; }
  bool is_infinity() const { return infinite_; }
  /// Undefined (NaN) for the point at infinity.
  Complex coord() const { return z_; }

 private:
  BoundaryPoint(Model m, Complex z, bool inf) : model_(m), z_(z), infinite_(inf) {}
  Model model_;
  Complex z_;
  bool infinite_;
};

/// A point of the Riemann sphere P^1 held as a unit vector of C^2.
/// [z0 : z1] stands for z0 / z1; [1 : 0] is infinity.
class ProjectivePoint {
 public:
  ProjectivePoint() : ProjectivePoint(Complex{0.0}, Complex{1.0}) {}
  ProjectivePoint(Complex z0, Complex z1);

  static ProjectivePoint from_complex(Complex z) { return {z, Complex{1.0}}; }
  static ProjectivePoint infinity() { return {Complex{1.0}, Complex{0.0}}; }
  /// Inverse of sphere(); the argument is normalized first.
  static ProjectivePoint from_sphere(const std::array<double, 3>& x);

  Complex z0() const { return z0_; }
  Complex z1() const { return z1_; }
  bool is_infinity(double tol = 0.0) const;
  /// Affine coordinate; infinite components for the point at infinity.
  Complex affine() const;
  /// Image on the unit sphere under inverse stereographic projection.
  std::array<double, 3> sphere() const;

 private:
  Complex z0_, z1_;
};

/// Chordal distance on the unit sphere between two points of P^1.
double chordal_distance(const ProjectivePoint& p, const ProjectivePoint& q);

/// Normalized 2x2 complex matrix acting by z -> (az+b)/(cz+d).
class MoebiusMap {
 public:
  /// Compositions allowed between automatic renormalizations.
  static constexpr int renormalize_every = 32;

  MoebiusMap() : MoebiusMap(identity()) {}
  /// Normalizes to det = 1; throws DegenerateMapError when |det| < 1e-14.
  MoebiusMap(Complex a, Complex b, Complex c, Complex d);

  static MoebiusMap identity();
  /// Real matrix acting on the half-plane.
  static MoebiusMap real(double a, double b, double c, double d);

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }
  Complex d() const { return d_; }

  Complex det() const { return a_ * d_ - b_ * c_; }
  Complex trace() const { return a_ + d_; }
  MoebiusMap inverse() const;
  bool is_real(double tol = 1e-12) const;
  /// True when the matrix preserves the unit disc (SU(1,1) form).
  bool preserves_disc(double tol = 1e-10) const;
  /// Distance to +I or -I in the max norm.
  double distance_to_identity() const;

  Complex apply(Complex z) const;
  ProjectivePoint apply(const ProjectivePoint& p) const;

  friend MoebiusMap operator*(const MoebiusMap& lhs, const MoebiusMap& rhs);

 private:
  struct Raw {};
  MoebiusMap(Raw, Complex a, Complex b, Complex c, Complex d, int depth)
      : a_(a), b_(b), c_(c), d_(d), depth_(depth) {}
  void normalize();

  Complex a_, b_, c_, d_;
  int depth_ = 0;
};

HPoint mobius_apply(const MoebiusMap& g, const HPoint& z);
BoundaryPoint mobius_apply(const MoebiusMap& g, const BoundaryPoint& xi);

/// |g'(z)| measured in the round metric 2|dz|/(1+|z|^2) on both sides.
/// Poles and infinity are handled in homogeneous coordinates.
double mobius_derivative_spherical(const MoebiusMap& g, const ProjectivePoint& z);
/// Logarithm of the above, without the exp/log round trip.
double log_mobius_derivative_spherical(const MoebiusMap& g, const ProjectivePoint& z);

/// Converts to the opposite model: half-plane -> disc by z -> (z-i)/(z+i),
/// disc -> half-plane by w -> i(1+w)/(1-w).
HPoint cayley(const HPoint& p);
BoundaryPoint cayley(const BoundaryPoint& xi);
HPoint to_half_plane(const HPoint& p);
HPoint to_disc(const HPoint& p);
BoundaryPoint to_half_plane(const BoundaryPoint& xi);
BoundaryPoint to_disc(const BoundaryPoint& xi);

/// Cayley transform half-plane -> disc as a matrix.
MoebiusMap cayley_matrix();

double hyperbolic_distance(const HPoint& x, const HPoint& y);

/// B_xi(x, y) = lim_{z->xi} d(x, z) - d(y, z). Positive when y is closer to xi.
double busemann(const BoundaryPoint& xi, const HPoint& x, const HPoint& y);

/// log of the Poisson kernel phi(w) = (1-|w|^2)/|1-w|^2 at a disc point,
/// i.e. the harmonic function pulled back from Im z.
double log_phi(const HPoint& p);

/// Arc-length parametrized geodesic ray from `start` towards `endpoint`.
class GeodesicRay {
 public:
  GeodesicRay(const HPoint& start, const BoundaryPoint& endpoint);

  const HPoint& start() const { return start_; }
  const BoundaryPoint& endpoint() const { return endpoint_; }
  /// Point at arc length s >= 0, in the model of `start`.
  HPoint at(double s) const;

 private:
  HPoint start_;
  BoundaryPoint endpoint_;
  // Real isometry taking i -> start and infinity -> endpoint (half-plane).
  MoebiusMap frame_;
};

}  // namespace lamina
