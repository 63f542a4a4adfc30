#pragma once

// Flat P^1-bundles over the genus-2 surface H / Gamma: (p, v) ~ (g p, rho(g) v).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lamina/brownian.hpp"
#include "lamina/hyperbolic.hpp"
#include "lamina/rng.hpp"

namespace lamina {

/// Generator index 0..3 stands for a1, b1, a2, b2.
struct Letter {
  int generator = 0;
  bool inverse = false;

  Letter inverted() const { return {generator, !inverse}; }
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Letters in the order they are applied: the word l1 l2 ... ln denotes the
/// map ln o ... o l1.
using Word = std::vector<Letter>;

std::string to_string(const Letter& l);
std::string to_string(const Word& w);
/// The word whose map is the inverse map.
Word inverse(const Word& w);

/// One side of the fundamental octagon. Sides are numbered
/// counterclockwise; side k faces the direction k*pi/4 seen from the centre.
struct DomainSide {
  Complex start_vertex;      // half-plane coordinates
  Complex end_vertex;
  int paired_side = 0;
  Letter letter;             // the generator (or inverse) equal to `pairing`
  MoebiusMap pairing;        // maps the paired side onto this side
  Complex neighbour_center;  // pairing(i): centre of the tile across this side
};

/// Cocompact surface group given by a Dirichlet fundamental polygon
/// centred at i in the half-plane.
class SurfaceGroup {
 public:
  int genus() const { return genus_; }
  const std::array<MoebiusMap, 4>& generators() const { return generators_; }
  const std::vector<DomainSide>& sides() const { return sides_; }
  HPoint center() const { return HPoint::half_plane({0.0, 1.0}); }

  MoebiusMap letter_map(const Letter& l) const;
  /// Map of a word (composed in application order).
  MoebiusMap evaluate(const Word& w) const;
  /// [a1, b1][a2, b2]; the identity up to sign for a valid presentation.
  MoebiusMap relator() const;

  /// Excess of side k's Dirichlet inequality at z: positive when z lies
  /// strictly beyond side k.
  double side_excess(Complex z, int k) const;
  /// Side with the largest excess above `tol`, or -1 when z is in the
  /// closed domain. `violated` receives the number of sides above tol.
  int worst_side(Complex z, int* violated = nullptr, double tol = 1e-12) const;
  bool contains(const HPoint& z, double tol = 1e-12) const;

  /// Interior angle at each vertex, from the geodesic sides.
  std::vector<double> vertex_angles() const;
  /// Hyperbolic area of the polygon by Gauss-Bonnet.
  double area() const;
  /// Largest distance from the centre to a vertex.
  double circumradius() const { return circumradius_; }

  friend SurfaceGroup build_genus2_octagon();

 private:
  int genus_ = 2;
  std::array<MoebiusMap, 4> generators_;
  std::vector<DomainSide> sides_;
  double circumradius_ = 0.0;
};

/// Regular octagon with interior angles pi/4 centred at the disc origin,
/// opposite-ish sides paired so that the relator is [a1,b1][a2,b2].
SurfaceGroup build_genus2_octagon();

/// Shared instance; the group is immutable.
const SurfaceGroup& genus2_group();

struct Reduction {
  HPoint point;
  Word word;  // evaluate(word) maps the input to `point`
};

/// Moves z into the closed fundamental domain by repeatedly applying the
/// inverse pairing of the most violated side. Each move strictly decreases
/// the distance to the centre. Throws ReductionFailure after 10^4 moves.
Reduction reduce_to_domain(const SurfaceGroup& g, const HPoint& z);

enum class FiberType { sphere, circle };
const char* to_string(FiberType t);

/// rho: one image per generator a1, b1, a2, b2.
class FiberRepresentation {
 public:
  FiberRepresentation() = default;
  explicit FiberRepresentation(const std::array<MoebiusMap, 4>& images);

  const std::array<MoebiusMap, 4>& images() const { return images_; }
  MoebiusMap image(const Letter& l) const;
  MoebiusMap evaluate(const Word& w) const;
  MoebiusMap relator() const;
  /// Generators whose image is exactly the identity; letters with such an
  /// image are skipped by the holonomy so trivial factors contribute 0.
  bool is_identity(int generator) const { return identity_[generator]; }
  bool all_real(double tol = 1e-12) const;
  /// h -> m h m^{-1} for every image.
  FiberRepresentation conjugated(const MoebiusMap& m) const;

 private:
  std::array<MoebiusMap, 4> images_;
  std::array<bool, 4> identity_{true, true, true, true};
};

/// A round disc in the affine chart of P^1.
struct Circle {
  Complex center;
  double radius;
};

/// Circles of the schottky(c, r) preset in the order: repelling and
/// attracting circle of a1's image, then of a2's image.
std::vector<Circle> schottky_circles(double c, double r);

class SuspensionFoliation {
 public:
  SuspensionFoliation(std::string name, const SurfaceGroup& base, FiberRepresentation rep, FiberType fiber,
                      bool leaves_simply_connected);

  const std::string& name() const { return name_; }
  const SurfaceGroup& base() const { return *base_; }
  const FiberRepresentation& rep() const { return rep_; }
  FiberType fiber_type() const { return fiber_; }
  /// Whether a generic leaf is a disc (so the universal-cover heat kernel is
  /// the leaf heat kernel).
  bool leaves_simply_connected() const { return simply_connected_; }
  /// Ping-pong circles of a Schottky preset; empty for other presets.
  const std::vector<Circle>& circles() const { return circles_; }
  void set_circles(std::vector<Circle> c) { circles_ = std::move(c); }

 private:
  std::string name_;
  const SurfaceGroup* base_;
  FiberRepresentation rep_;
  FiberType fiber_;
  bool simply_connected_;
  std::vector<Circle> circles_;
};

/// The group acting on its own boundary circle P^1(R).
SuspensionFoliation fuchsian_boundary();
/// a1 -> A, a2 -> B = R A R^{-1} (R: z -> iz), b1, b2 -> identity, where A
/// pairs the circles |z + c| = r and |z - c| = r. Needs c > sqrt(2) r > 0.
SuspensionFoliation schottky(double c, double r);
/// Every generator acts trivially.
SuspensionFoliation trivial_suspension();
/// Parses "fuchsian-boundary", "trivial", "schottky" or "schottky(c, r)".
SuspensionFoliation make_preset(const std::string& name);


struct HolonomyState {
  HPoint base_point = HPoint::half_plane({0.0, 1.0});
  Word word;
  ProjectivePoint fiber_start;
  ProjectivePoint fiber_point;
  double log_deriv = 0.0;         // log |h'| in the round metric
  double log_deriv_affine = 0.0;  // log |h'| in the affine chart
  double time = 0.0;
  std::size_t bisections = 0;
};

/// Streams a Brownian path through the lamination: the base point lives in
/// the fundamental domain and each step is replayed at the reduced point.
/// Whenever the base point leaves through a side, the deck move l is
/// applied to it and rho(l) to the fiber point.
class HolonomyWalker {
 public:
  static constexpr int max_bisections = 20;

  HolonomyWalker(const SuspensionFoliation& f, const HPoint& start, const ProjectivePoint& fiber_start,
                 bool record_word = true);

  void advance(const PathIncrement& inc, double dt);
  const HolonomyState& state() const { return state_; }

 private:
  void move(const PathIncrement& inc, int depth);
  void reduce();
  void apply(const Letter& l);

  const SuspensionFoliation* f_;
  HolonomyState state_;
  bool record_word_;
  double max_step_;
};

/// Replays `path` (starting from its first sample) through the lamination.
HolonomyState holonomy_along_path(const SuspensionFoliation& f, const BrownianPath& path,
                                  const ProjectivePoint& fiber_start);

/// Distance from rho(word) applied to the fiber start to the tracked fiber
/// point (chordal), and the log-derivative mismatch.
struct HolonomyConsistency {
  double fiber_error = 0.0;
  double log_deriv_error = 0.0;
};
HolonomyConsistency recheck_holonomy(const SuspensionFoliation& f, const HolonomyState& s);

/// Point of the fundamental domain drawn from the normalized area measure.
HPoint sample_domain_point(const SurfaceGroup& g, StreamRng& rng);

struct GeodesicLift {
  std::vector<double> times;
  std::vector<HPoint> lifted;     // the leaf geodesic in the universal cover
  std::vector<HPoint> projected;  // the same points reduced to the domain
  ProjectivePoint fiber_point;    // constant along a leaf of a flat bundle
  double max_defect = 0.0;        // max |d(a(t), a(t')) - |t - t'||
  double rho = 1.0;               // smallest quasi-geodesic constant seen
  BoundaryPoint endpoint = BoundaryPoint::half_plane_infinity();  // estimated limit point
};

/// Geodesic-flow trajectory from `start` towards `direction`, sampled at
/// `samples` + 1 equally spaced times in [0, T].
GeodesicLift lift_geodesic_trajectory(const SuspensionFoliation& f, const HPoint& start,
                                      const BoundaryPoint& direction, double T,
                                      const ProjectivePoint& fiber_point = {}, std::size_t samples = 200);

/// Monte Carlo comparison of the Poincare area of a box R and of its
/// preimage under x + iy -> x + i e^t y; the ratio should be e^t.
struct JacobianReport {
  double t = 0.0;
  double ratio = 0.0;
  double std_error = 0.0;
  double expected = 0.0;
  double relative_error = 0.0;
  std::size_t samples = 0;
};
JacobianReport flow_jacobian_check(double t, std::size_t N = 1 << 20, std::uint64_t seed = 1);

}  // namespace lamina
