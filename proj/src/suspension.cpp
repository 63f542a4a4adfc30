#include "lamina/suspension.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <regex>

#include "lamina/errors.hpp"
#include "lamina/parallel.hpp"

namespace lamina {

namespace {

const Complex kI{0.0, 1.0};
constexpr int kReductionCap = 10000;

const char* kGeneratorNames[4] = {"a1", "b1", "a2", "b2"};

MoebiusMap rot(double a) { return {std::polar(1.0, a / 2.0), 0.0, 0.0, std::polar(1.0, -a / 2.0)}; }

// Real matrix of a disc isometry conjugated into the half-plane.
MoebiusMap to_half_plane_map(const MoebiusMap& g) {
  const MoebiusMap c = cayley_matrix();
  const MoebiusMap h = c.inverse() * g * c;
  if (!h.is_real(1e-12)) throw NumericalError("octagon pairing is not real in the half-plane");
  return MoebiusMap::real(h.a().real(), h.b().real(), h.c().real(), h.d().real());
}

Complex disc_to_half_plane(Complex w) { return cayley(HPoint::disc(w)).coord(); }

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::string to_string(const Letter& l) {
  return std::string(kGeneratorNames[l.generator]) + (l.inverse ? "^-1" : "");
}

std::string to_string(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += to_string(w[i]);
  }
  return out;
}

Word inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverted());
  return out;
}

// ---------------------------------------------------------------------------
// Surface group

MoebiusMap SurfaceGroup::letter_map(const Letter& l) const {
  const MoebiusMap& g = generators_.at(l.generator);
  return l.inverse ? g.inverse() : g;
}

MoebiusMap SurfaceGroup::evaluate(const Word& w) const {
  MoebiusMap m = MoebiusMap::identity();
  for (const Letter& l : w) m = letter_map(l) * m;
  return m;
}

MoebiusMap SurfaceGroup::relator() const {
  const auto& g = generators_;
  return g[0] * g[1] * g[0].inverse() * g[1].inverse() * g[2] * g[3] * g[2].inverse() * g[3].inverse();
}

double SurfaceGroup::side_excess(Complex z, int k) const {
  // d(z, i) > d(z, c) <=> |z - i|^2 Im c > |z - c|^2 Im i.
  const Complex c = sides_[k].neighbour_center;
  return std::norm(z - kI) * c.imag() / std::norm(z - c) - 1.0;
}

int SurfaceGroup::worst_side(Complex z, int* violated, double tol) const {
  int worst = -1, count = 0;
  double best = tol;
  for (int k = 0; k < static_cast<int>(sides_.size()); ++k) {
    const double e = side_excess(z, k);
    if (e > tol) {
      ++count;
      if (e > best) {
        best = e;
        worst = k;
      }
    }
  }
  if (violated) *violated = count;
  return worst;
}

bool SurfaceGroup::contains(const HPoint& z, double tol) const {
  return worst_side(to_half_plane(z).coord(), nullptr, tol) < 0;
}

std::vector<double> SurfaceGroup::vertex_angles() const {
  const std::size_t n = sides_.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Vertex shared by side k (its end) and side k+1 (its start).
    const Complex v = to_disc(HPoint::half_plane(sides_[k].end_vertex)).coord();
    const Complex p = to_disc(HPoint::half_plane(sides_[k].start_vertex)).coord();
    const Complex q = to_disc(HPoint::half_plane(sides_[(k + 1) % n].end_vertex)).coord();
    // Geodesics through the disc origin are radial.
    auto centred = [v](Complex w) { return (w - v) / (1.0 - std::conj(v) * w); };
    double a = std::abs(std::arg(centred(p)) - std::arg(centred(q)));
    if (a > std::numbers::pi) a = 2.0 * std::numbers::pi - a;
    out[k] = a;
  }
  return out;
}

double SurfaceGroup::area() const {
  double sum = 0.0;
  for (double a : vertex_angles()) sum += a;
  return (static_cast<double>(sides_.size()) - 2.0) * std::numbers::pi - sum;
}

SurfaceGroup build_genus2_octagon() {
  const double pi = std::numbers::pi;
  // Centre-to-side distance h of the regular octagon with angles pi/4:
  // cosh h = 1 + sqrt 2. Side k's pairing translates by 2h along direction
  // k pi/4 after rotating the paired side opposite to side k.
  const double ch = 1.0 + std::sqrt(2.0);
  const double sh = std::sqrt(ch * ch - 1.0);
  const MoebiusMap shift{ch, sh, sh, ch};
  const double vertex_radius = std::pow(2.0, -0.25);

  const int paired[8] = {2, 3, 0, 1, 6, 7, 4, 5};
  const Letter letters[8] = {{0, false}, {1, true}, {0, true}, {1, false},
                             {2, false}, {3, true}, {2, true}, {3, false}};

  SurfaceGroup g;
  g.sides_.resize(8);
  for (int k = 0; k < 8; ++k) {
    const double th = k * pi / 4.0;
    const MoebiusMap disc_map = rot(th) * shift * rot(pi - paired[k] * pi / 4.0);
    DomainSide& s = g.sides_[k];
    s.paired_side = paired[k];
    s.letter = letters[k];
    s.pairing = to_half_plane_map(disc_map);
    s.neighbour_center = mobius_apply(s.pairing, g.center()).coord();
    s.start_vertex = disc_to_half_plane(std::polar(vertex_radius, th - pi / 8.0));
    s.end_vertex = disc_to_half_plane(std::polar(vertex_radius, th + pi / 8.0));
  }
  for (int k = 0; k < 8; ++k) {
    const Letter& l = letters[k];
    if (!l.inverse) g.generators_[l.generator] = g.sides_[k].pairing;
  }
  for (const DomainSide& s : g.sides_) {
    g.circumradius_ = std::max(g.circumradius_, hyperbolic_distance(g.center(), HPoint::half_plane(s.start_vertex)));
  }
  return g;
}

const SurfaceGroup& genus2_group() {
  static const SurfaceGroup group = build_genus2_octagon();
  return group;
}

Reduction reduce_to_domain(const SurfaceGroup& g, const HPoint& z) {
  Reduction out{to_half_plane(z), {}};
  for (int it = 0; it < kReductionCap; ++it) {
    const int k = g.worst_side(out.point.coord());
    if (k < 0) return out;
    const Letter l = g.sides()[k].letter.inverted();
    out.point = mobius_apply(g.letter_map(l), out.point);
    out.word.push_back(l);
  }
  throw ReductionFailure("fundamental-domain reduction exceeded " + std::to_string(kReductionCap) + " moves");
}

// ---------------------------------------------------------------------------
// Representations and presets

const char* to_string(FiberType t) { return t == FiberType::sphere ? "sphere" : "circle"; }

FiberRepresentation::FiberRepresentation(const std::array<MoebiusMap, 4>& images) : images_(images) {
  for (int k = 0; k < 4; ++k) identity_[k] = images_[k].distance_to_identity() == 0.0;
}

MoebiusMap FiberRepresentation::image(const Letter& l) const {
  const MoebiusMap& g = images_.at(l.generator);
  return l.inverse ? g.inverse() : g;
}

MoebiusMap FiberRepresentation::evaluate(const Word& w) const {
  MoebiusMap m = MoebiusMap::identity();
  for (const Letter& l : w) {
    if (!identity_[l.generator]) m = image(l) * m;
  }
  return m;
}

MoebiusMap FiberRepresentation::relator() const {
  const auto& g = images_;
  return g[0] * g[1] * g[0].inverse() * g[1].inverse() * g[2] * g[3] * g[2].inverse() * g[3].inverse();
}

bool FiberRepresentation::all_real(double tol) const {
  return std::all_of(images_.begin(), images_.end(), [tol](const MoebiusMap& g) { return g.is_real(tol); });
}

FiberRepresentation FiberRepresentation::conjugated(const MoebiusMap& m) const {
  FiberRepresentation out;
  for (int k = 0; k < 4; ++k) {
    out.images_[k] = identity_[k] ? MoebiusMap::identity() : m * images_[k] * m.inverse();
    out.identity_[k] = identity_[k];
  }
  return out;
}

SuspensionFoliation::SuspensionFoliation(std::string name, const SurfaceGroup& base, FiberRepresentation rep,
                                         FiberType fiber, bool leaves_simply_connected)
    : name_(std::move(name)), base_(&base), rep_(std::move(rep)), fiber_(fiber),
      simply_connected_(leaves_simply_connected) {
  if (fiber_ == FiberType::circle && !rep_.all_real(1e-9)) {
    throw ParameterError("a circle fiber needs a representation with real images");
  }
}

SuspensionFoliation fuchsian_boundary() {
  const SurfaceGroup& g = genus2_group();
  // Stabilizers of generic boundary points are trivial, so generic leaves
  // are discs.
  return {"fuchsian-boundary", g, FiberRepresentation(g.generators()), FiberType::circle, true};
}

std::vector<Circle> schottky_circles(double c, double r) {
  return {{{-c, 0.0}, r}, {{c, 0.0}, r}, {{0.0, -c}, r}, {{0.0, c}, r}};
}

SuspensionFoliation schottky(double c, double r) {
  if (!(r > 0.0) || !(c > std::sqrt(2.0) * r) || !std::isfinite(c)) {
    throw ParameterError("schottky preset needs c > sqrt(2) r > 0 so the four circles are disjoint");
  }
  // A maps the outside of |z + c| = r onto the inside of |z - c| = r.
  const MoebiusMap A{c, c * c - r * r, 1.0, c};
  const MoebiusMap R = rot(std::numbers::pi / 2.0);
  const MoebiusMap B = R * A * R.inverse();
  const MoebiusMap I = MoebiusMap::identity();
  // b1, b2 act trivially, so leaves are never simply connected.
  SuspensionFoliation f{"schottky(" + format_number(c) + "," + format_number(r) + ")", genus2_group(),
                        FiberRepresentation({A, I, B, I}), FiberType::sphere, false};
  f.set_circles(schottky_circles(c, r));
  return f;
}

SuspensionFoliation trivial_suspension() {
  const MoebiusMap I = MoebiusMap::identity();
  return {"trivial", genus2_group(), FiberRepresentation({I, I, I, I}), FiberType::sphere, false};
}

SuspensionFoliation make_preset(const std::string& name) {
  if (name == "fuchsian-boundary") return fuchsian_boundary();
  if (name == "trivial") return trivial_suspension();
  if (name == "schottky") return schottky(4.0, 1.0);
  static const std::regex re(R"(\s*schottky\s*\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*)");
  std::smatch m;
  if (std::regex_match(name, m, re)) {
    double c = 0.0, r = 0.0;
    try {
      c = std::stod(m[1].str());
      r = std::stod(m[2].str());
    } catch (const std::exception&) {
      throw ParameterError("cannot parse schottky parameters in '" + name + "'");
    }
    return schottky(c, r);
  }
  throw ParameterError("unknown preset '" + name + "' (expected fuchsian-boundary, schottky(c, r) or trivial)");
}

// ---------------------------------------------------------------------------
// Holonomy

HolonomyWalker::HolonomyWalker(const SuspensionFoliation& f, const HPoint& start,
                               const ProjectivePoint& fiber_start, bool record_word)
    : f_(&f), record_word_(record_word), max_step_(2.0 * f.base().circumradius()) {
  if (f.fiber_type() == FiberType::circle &&
      std::abs((fiber_start.z0() * std::conj(fiber_start.z1())).imag()) > 1e-12) {
    throw ParameterError("fiber start must lie on the real circle for a circle fiber");
  }
  state_.base_point = to_half_plane(start);
  state_.fiber_start = fiber_start;
  state_.fiber_point = fiber_start;
  reduce();
}

void HolonomyWalker::apply(const Letter& l) {
  state_.base_point = mobius_apply(f_->base().letter_map(l), state_.base_point);
  if (record_word_) state_.word.push_back(l);
  if (f_->rep().is_identity(l.generator)) return;
  const MoebiusMap m = f_->rep().image(l);
  const ProjectivePoint& v = state_.fiber_point;
  state_.log_deriv += log_mobius_derivative_spherical(m, v);
  // |m'(z)| = 1 / |cz + d|^2 with z = z0 / z1.
  state_.log_deriv_affine += 2.0 * std::log(std::abs(v.z1())) - 2.0 * std::log(std::abs(m.c() * v.z0() + m.d() * v.z1()));
  state_.fiber_point = m.apply(v);
}

void HolonomyWalker::reduce() {
  const SurfaceGroup& g = f_->base();
  for (int it = 0; it < kReductionCap; ++it) {
    const int k = g.worst_side(state_.base_point.coord());
    if (k < 0) return;
    apply(g.sides()[k].letter.inverted());
  }
  throw ReductionFailure("holonomy reduction exceeded " + std::to_string(kReductionCap) + " moves");
}

void HolonomyWalker::move(const PathIncrement& inc, int depth) {
  const Complex next = apply_increment(state_.base_point.coord(), inc);
  int violated = 0;
  f_->base().worst_side(next, &violated);
  if (violated >= 2 && depth < max_bisections) {
    // Split the affine step w -> u + e^v w into two halves whose composition
    // is the original step.
    ++state_.bisections;
    const PathIncrement first{0.5 * inc.horizontal, 0.5 * inc.log_vertical};
    const PathIncrement second{0.5 * inc.horizontal * std::exp(-0.5 * inc.log_vertical), 0.5 * inc.log_vertical};
    move(first, depth + 1);
    move(second, depth + 1);
    return;
  }
  state_.base_point = HPoint::half_plane(next);
  reduce();
}

void HolonomyWalker::advance(const PathIncrement& inc, double dt) {
  if (std::abs(inc.horizontal) > 1.0 || std::abs(inc.log_vertical) > 1.0) {
    const double d = hyperbolic_distance(HPoint::half_plane(kI),
                                         HPoint::half_plane({inc.horizontal, std::exp(inc.log_vertical)}));
    if (d > max_step_) {
      throw ParameterError("path step of length " + std::to_string(d) + " exceeds the domain diameter");
    }
  }
  move(inc, 0);
  state_.time += dt;
}

HolonomyState holonomy_along_path(const SuspensionFoliation& f, const BrownianPath& path,
                                  const ProjectivePoint& fiber_start) {
  if (path.samples.empty()) throw ParameterError("empty Brownian path");
  HolonomyWalker walker(f, path.samples.front(), fiber_start);
  for (std::size_t k = 0; k < path.increments.size(); ++k) {
    walker.advance(path.increments[k], path.times[k + 1] - path.times[k]);
  }
  return walker.state();
}

HolonomyConsistency recheck_holonomy(const SuspensionFoliation& f, const HolonomyState& s) {
  const MoebiusMap m = f.rep().evaluate(s.word);
  return {chordal_distance(m.apply(s.fiber_start), s.fiber_point),
          std::abs(log_mobius_derivative_spherical(m, s.fiber_start) - s.log_deriv)};
}

HPoint sample_domain_point(const SurfaceGroup& g, StreamRng& rng) {
  // Uniform area in the hyperbolic ball of the circumradius, then rejection.
  const double cosh_max = std::cosh(g.circumradius());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double rho = std::acosh(1.0 + rng.uniform() * (cosh_max - 1.0));
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const HPoint z = cayley(HPoint::disc(std::polar(std::tanh(0.5 * rho), theta)));
    if (g.contains(z)) return z;
  }
  throw NumericalError("rejection sampling of the fundamental domain did not terminate");
}

// ---------------------------------------------------------------------------
// Geodesic flow

namespace {

// Forward endpoint of the geodesic through p then q (half-plane).
BoundaryPoint forward_endpoint(Complex p, Complex q) {
  const double dx = q.real() - p.real();
  if (std::abs(dx) <= 1e-14 * (1.0 + std::abs(p.real()))) {
    return q.imag() > p.imag() ? BoundaryPoint::half_plane_infinity() : BoundaryPoint::half_plane(p.real());
  }
  const double m = (std::norm(q) - std::norm(p)) / (2.0 * dx);
  const double radius = std::abs(p - m);
  return BoundaryPoint::half_plane(m + std::copysign(radius, dx));
}

}  // namespace

GeodesicLift lift_geodesic_trajectory(const SuspensionFoliation& f, const HPoint& start,
                                      const BoundaryPoint& direction, double T,
                                      const ProjectivePoint& fiber_point, std::size_t samples) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("trajectory length must be positive");
  if (samples < 1) throw ParameterError("need at least one sampling interval");
  const GeodesicRay ray(start, direction);
  GeodesicLift out;
  out.fiber_point = fiber_point;
  for (std::size_t j = 0; j <= samples; ++j) {
    const double t = T * static_cast<double>(j) / static_cast<double>(samples);
    const HPoint p = to_half_plane(ray.at(t));
    out.times.push_back(t);
    out.lifted.push_back(p);
    out.projected.push_back(reduce_to_domain(f.base(), p).point);
  }
  for (std::size_t j = 0; j <= samples; ++j) {
    for (std::size_t k = j + 1; k <= samples; ++k) {
      const double dt = out.times[k] - out.times[j];
      const double d = hyperbolic_distance(out.lifted[j], out.lifted[k]);
      out.max_defect = std::max(out.max_defect, std::abs(d - dt));
      if (d > 0.0) out.rho = std::max({out.rho, d / dt, dt / d});
    }
  }
  const BoundaryPoint end =
      forward_endpoint(out.lifted[samples - 1].coord(), out.lifted[samples].coord());
  out.endpoint = direction.model() == Model::disc ? to_disc(end) : end;
  return out;
}

JacobianReport flow_jacobian_check(double t, std::size_t N, std::uint64_t seed) {
  if (!(t >= 0.0 && t <= 5.0)) throw ParameterError("jacobian check needs t in [0, 5]");
  if (N < 2) throw ParameterError("jacobian check needs N >= 2");
  // Box R = [-1/2, 1/2] x [1, 2] and its preimage [-1/2, 1/2] x [e^-t, 2e^-t]
  // under x + iy -> x + i e^t y. Area = Euclidean area * mean of 1/y^2; the
  // x coordinate does not enter the density, so only y is sampled.
  auto area = [&](double y0, std::uint64_t stream) {
    StreamRng rng(seed, StreamTag::sample, stream);
    std::vector<double> w(N);
    for (auto& v : w) {
      const double y = y0 * (1.0 + rng.uniform());
      v = y0 / (y * y);
    }
    return mean_stats(w);
  };
  const MeanStats box = area(1.0, 0);
  const MeanStats pre = area(std::exp(-t), 1);
  JacobianReport rep;
  rep.t = t;
  rep.samples = N;
  rep.ratio = pre.mean / box.mean;
  rep.std_error = rep.ratio * std::hypot(pre.std_error / pre.mean, box.std_error / box.mean);
  rep.expected = std::exp(t);
  rep.relative_error = std::abs(rep.ratio / rep.expected - 1.0);
  return rep;
}

}  // namespace lamina
