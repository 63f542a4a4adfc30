#include "lamina/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lamina/errors.hpp"

namespace lamina {

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kDegenerateDet = 1e-14;
const Complex kI{0.0, 1.0};

double max_abs(const MoebiusMap& g) {
  return std::max({std::abs(g.a()), std::abs(g.b()), std::abs(g.c()), std::abs(g.d())});
}

}  // namespace

const char* to_string(Model m) { return m == Model::disc ? "disc" : "half-plane"; }

// ---------------------------------------------------------------------------
// Points

HPoint HPoint::half_plane(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(z.imag() > 0.0)) {
    throw ParameterError("half-plane point needs finite coordinates and Im z > 0, got (" +
                         std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  }
  return {Model::half_plane, z};
}

HPoint HPoint::disc(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(std::abs(z) < 1.0)) {
    throw ParameterError("disc point needs |z| < 1, got |z| = " + std::to_string(std::abs(z)));
  }
  return {Model::disc, z};
}

BoundaryPoint BoundaryPoint::disc(Complex z) {
  const double r = std::abs(z);
  if (!(std::abs(r - 1.0) <= kBoundaryTol)) {
    throw ParameterError("disc boundary point needs |z| = 1, got " + std::to_string(r));
  }
  return {Model::disc, z / r, false};
}

BoundaryPoint BoundaryPoint::half_plane(double x) {
  if (!std::isfinite(x)) return half_plane_infinity();
  return {Model::half_plane, Complex{x, 0.0}, false};
}

BoundaryPoint BoundaryPoint::half_plane_infinity() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {Model::half_plane, Complex{nan, nan}, true};
}

ProjectivePoint::ProjectivePoint(Complex z0, Complex z1) {
  const double scale = std::max(std::abs(z0), std::abs(z1));
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError("projective point needs a finite nonzero vector");
  }
  z0 /= scale;
  z1 /= scale;
  const double n = std::sqrt(std::norm(z0) + std::norm(z1));
  z0_ = z0 / n;
  z1_ = z1 / n;
}

bool ProjectivePoint::is_infinity(double tol) const { return std::abs(z1_) <= tol; }

Complex ProjectivePoint::affine() const {
  if (z1_ == Complex{0.0}) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  return z0_ / z1_;
}

std::array<double, 3> ProjectivePoint::sphere() const {
  const Complex m = z0_ * std::conj(z1_);
  return {2.0 * m.real(), 2.0 * m.imag(), std::norm(z0_) - std::norm(z1_)};
}

ProjectivePoint ProjectivePoint::from_sphere(const std::array<double, 3>& x) {
  const double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (!(n > 0.0)) throw ParameterError("sphere point must be nonzero");
  const double X = x[0] / n, Y = x[1] / n, Z = x[2] / n;
  // z = (X + iY)/(1 - Z) = (1 + Z)/(X - iY); use the better conditioned form.
  if (Z <= 0.0) return {Complex{X, Y}, Complex{1.0 - Z}};
  return {Complex{1.0 + Z}, Complex{X, -Y}};
}

double chordal_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  return 2.0 * std::abs(p.z0() * q.z1() - p.z1() * q.z0());
}

// ---------------------------------------------------------------------------
// Moebius maps

MoebiusMap::MoebiusMap(Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {
  normalize();
}

MoebiusMap MoebiusMap::identity() { return {Raw{}, 1.0, 0.0, 0.0, 1.0, 0}; }

MoebiusMap MoebiusMap::real(double a, double b, double c, double d) {
  if (!(a * d - b * c > 0.0)) {
    throw ParameterError("real Moebius map needs a positive determinant");
  }
  return {a, b, c, d};
}

void MoebiusMap::normalize() {
  const Complex det = a_ * d_ - b_ * c_;
  if (!(std::abs(det) >= kDegenerateDet) || !std::isfinite(std::abs(det))) {
    throw DegenerateMapError("Moebius matrix is degenerate (|det| = " + std::to_string(std::abs(det)) +
                             ")");
  }
  Complex s = std::sqrt(det);
  // Keep real matrices real: for det > 0 std::sqrt already returns a real root.
  a_ /= s;
  b_ /= s;
  c_ /= s;
  d_ /= s;
  depth_ = 0;
}

MoebiusMap MoebiusMap::inverse() const { return {Raw{}, d_, -b_, -c_, a_, depth_}; }

bool MoebiusMap::is_real(double tol) const {
  const double scale = max_abs(*this);
  return std::abs(a_.imag()) <= tol * scale && std::abs(b_.imag()) <= tol * scale &&
         std::abs(c_.imag()) <= tol * scale && std::abs(d_.imag()) <= tol * scale;
}

bool MoebiusMap::preserves_disc(double tol) const {
  const double scale = max_abs(*this);
  return std::abs(a_ - std::conj(d_)) <= tol * scale && std::abs(b_ - std::conj(c_)) <= tol * scale;
}

double MoebiusMap::distance_to_identity() const {
  auto dist = [&](double s) {
    return std::max({std::abs(a_ - s), std::abs(b_), std::abs(c_), std::abs(d_ - s)});
  };
  return std::min(dist(1.0), dist(-1.0));
}

Complex MoebiusMap::apply(Complex z) const { return (a_ * z + b_) / (c_ * z + d_); }

ProjectivePoint MoebiusMap::apply(const ProjectivePoint& p) const {
  return {a_ * p.z0() + b_ * p.z1(), c_ * p.z0() + d_ * p.z1()};
}

MoebiusMap operator*(const MoebiusMap& lhs, const MoebiusMap& rhs) {
  MoebiusMap out{MoebiusMap::Raw{},
                 lhs.a_ * rhs.a_ + lhs.b_ * rhs.c_,
                 lhs.a_ * rhs.b_ + lhs.b_ * rhs.d_,
                 lhs.c_ * rhs.a_ + lhs.d_ * rhs.c_,
                 lhs.c_ * rhs.b_ + lhs.d_ * rhs.d_,
                 std::max(lhs.depth_, rhs.depth_) + 1};
  if (out.depth_ >= MoebiusMap::renormalize_every) out.normalize();
  return out;
}

HPoint mobius_apply(const MoebiusMap& g, const HPoint& z) {
  if (z.model() == Model::half_plane) {
    if (!g.is_real(1e-9)) throw ParameterError("half-plane action needs a real Moebius map");
    const double a = g.a().real(), b = g.b().real(), c = g.c().real(), d = g.d().real();
    const Complex w = z.coord();
    // Im((aw+b)/(cw+d)) = Im w / |cw+d|^2 for det = 1; computing it this way
    // keeps the imaginary part accurate deep in the cusp.
    const Complex den = c * w + d;
    const double n = std::norm(den);
    const double re = ((a * w.real() + b) * (c * w.real() + d) + a * c * w.imag() * w.imag()) / n;
    return HPoint::half_plane({re, w.imag() / n});
  }
  if (!g.preserves_disc()) throw ParameterError("disc action needs a map preserving the unit disc");
  return HPoint::disc(g.apply(z.coord()));
}

BoundaryPoint mobius_apply(const MoebiusMap& g, const BoundaryPoint& xi) {
  if (xi.model() == Model::half_plane) {
    if (!g.is_real(1e-9)) throw ParameterError("half-plane action needs a real Moebius map");
    const double a = g.a().real(), b = g.b().real(), c = g.c().real(), d = g.d().real();
    if (xi.is_infinity()) {
      return c == 0.0 ? BoundaryPoint::half_plane_infinity() : BoundaryPoint::half_plane(a / c);
    }
    const double x = xi.coord().real();
    const double den = c * x + d;
    if (den == 0.0) return BoundaryPoint::half_plane_infinity();
    return BoundaryPoint::half_plane((a * x + b) / den);
  }
  if (!g.preserves_disc()) throw ParameterError("disc action needs a map preserving the unit disc");
  return BoundaryPoint::disc(g.apply(xi.coord()));
}

double log_mobius_derivative_spherical(const MoebiusMap& g, const ProjectivePoint& z) {
  // For a unit vector v: |g'|_sph = |det g| / |g v|^2.
  const Complex w0 = g.a() * z.z0() + g.b() * z.z1();
  const Complex w1 = g.c() * z.z0() + g.d() * z.z1();
  return std::log(std::abs(g.det())) - std::log(std::norm(w0) + std::norm(w1));
}

double mobius_derivative_spherical(const MoebiusMap& g, const ProjectivePoint& z) {
  return std::exp(log_mobius_derivative_spherical(g, z));
}

// ---------------------------------------------------------------------------
// Model changes

MoebiusMap cayley_matrix() { return {1.0, -kI, 1.0, kI}; }

HPoint cayley(const HPoint& p) {
  const Complex z = p.coord();
  if (p.model() == Model::half_plane) {
    const Complex w = (z - kI) / (z + kI);
    // |w| can round to 1 far out in the cusp; the point is still interior.
    if (!(std::abs(w) < 1.0)) {
      throw ParameterError("point too close to the boundary to represent in the disc");
    }
    return HPoint::disc(w);
  }
  const Complex h = kI * (1.0 + z) / (1.0 - z);
  // Im h = (1-|z|^2)/|1-z|^2 exactly; recompute it to avoid cancellation.
  const double im = (1.0 - std::abs(z)) * (1.0 + std::abs(z)) / std::norm(1.0 - z);
  return HPoint::half_plane({h.real(), im});
}

BoundaryPoint cayley(const BoundaryPoint& xi) {
  if (xi.model() == Model::half_plane) {
    if (xi.is_infinity()) return BoundaryPoint::disc(1.0);
    const Complex s = xi.coord();
    return BoundaryPoint::disc((s - kI) / (s + kI));
  }
  const Complex w = xi.coord();
  if (std::abs(1.0 - w) < 1e-15) return BoundaryPoint::half_plane_infinity();
  const double theta = std::arg(w);
  return BoundaryPoint::half_plane(-1.0 / std::tan(theta / 2.0));
}

HPoint to_half_plane(const HPoint& p) { return p.model() == Model::half_plane ? p : cayley(p); }
HPoint to_disc(const HPoint& p) { return p.model() == Model::disc ? p : cayley(p); }
BoundaryPoint to_half_plane(const BoundaryPoint& xi) {
  return xi.model() == Model::half_plane ? xi : cayley(xi);
}
BoundaryPoint to_disc(const BoundaryPoint& xi) { return xi.model() == Model::disc ? xi : cayley(xi); }

// ---------------------------------------------------------------------------
// Metric quantities

double hyperbolic_distance(const HPoint& x, const HPoint& y) {
  if (x.model() == Model::disc && y.model() == Model::disc) {
    const Complex z = x.coord(), w = y.coord();
    const double az = std::abs(z), aw = std::abs(w);
    const double den = std::sqrt((1.0 - az) * (1.0 + az) * (1.0 - aw) * (1.0 + aw));
    return 2.0 * std::asinh(std::abs(z - w) / den);
  }
  const Complex z = to_half_plane(x).coord(), w = to_half_plane(y).coord();
  return 2.0 * std::asinh(std::abs(z - w) / (2.0 * std::sqrt(z.imag() * w.imag())));
}

double busemann(const BoundaryPoint& xi, const HPoint& x, const HPoint& y) {
  const BoundaryPoint s = to_half_plane(xi);
  const Complex zx = to_half_plane(x).coord(), zy = to_half_plane(y).coord();
  if (s.is_infinity()) return std::log(zy.imag() / zx.imag());
  const double r = s.coord().real();
  // Poisson kernel of the half-plane at r, up to a constant factor.
  auto log_kernel = [r](Complex z) { return std::log(z.imag()) - std::log(std::norm(z - r)); };
  return log_kernel(zy) - log_kernel(zx);
}

double log_phi(const HPoint& p) {
  if (p.model() == Model::half_plane) return std::log(p.coord().imag());
  const Complex w = p.coord();
  const double aw = std::abs(w);
  return std::log((1.0 - aw) * (1.0 + aw)) - std::log(std::norm(1.0 - w));
}

// ---------------------------------------------------------------------------
// Geodesic rays

namespace {

MoebiusMap ray_frame(const HPoint& start, const BoundaryPoint& endpoint) {
  const Complex p = to_half_plane(start).coord();
  const BoundaryPoint xi = to_half_plane(endpoint);
  if (xi.is_infinity()) return MoebiusMap::real(p.imag(), p.real(), 0.0, 1.0);
  const double x = xi.coord().real();
  const Complex q = 1.0 / (x - p);
  // Translate-scale so i -> q, then z -> x - 1/z sends q -> p and infinity -> x.
  return MoebiusMap::real(x, -1.0, 1.0, 0.0) * MoebiusMap::real(q.imag(), q.real(), 0.0, 1.0);
}

}  // namespace

GeodesicRay::GeodesicRay(const HPoint& start, const BoundaryPoint& endpoint)
    : start_(start), endpoint_(endpoint), frame_(ray_frame(start, endpoint)) {}

HPoint GeodesicRay::at(double s) const {
  if (s < 0.0) throw ParameterError("geodesic ray parameter must be nonnegative");
  const HPoint h = mobius_apply(frame_, HPoint::half_plane({0.0, std::exp(s)}));
  return start_.model() == Model::half_plane ? h : cayley(h);
}

}  // namespace lamina
