#pragma once

// Intersection theory on the ruled surface X = P(L + O) over a genus-g
// curve: H^2(X, Z) = Z sigma + Z phi with sigma^2 = chi = 2 - 2g,
// sigma.phi = 1, phi^2 = 0. All arithmetic is exact.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

namespace lamina {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Integer& x);
/// "p/q" in lowest terms, or "p" for integers.
std::string to_string(const Rational& x);

struct RuledSurfaceContext {
  Integer genus;
  Integer chi;

  /// Rejects g < 2: the ampleness criterion below needs sigma^2 < 0.
  static RuledSurfaceContext for_genus(const Integer& g);
};

/// a sigma + b phi.
struct DivisorClass {
  Integer a;
  Integer b;

  static DivisorClass sigma() { return {1, 0}; }
  static DivisorClass phi() { return {0, 1}; }

  friend DivisorClass operator+(const DivisorClass& x, const DivisorClass& y) { return {x.a + y.a, x.b + y.b}; }
  friend DivisorClass operator-(const DivisorClass& x, const DivisorClass& y) { return {x.a - y.a, x.b - y.b}; }
  friend DivisorClass operator*(const Integer& k, const DivisorClass& x) { return {k * x.a, k * x.b}; }
  friend bool operator==(const DivisorClass& x, const DivisorClass& y) { return x.a == y.a && x.b == y.b; }
};

std::string to_string(const DivisorClass& c);

Integer intersect(const DivisorClass& c1, const DivisorClass& c2, const RuledSurfaceContext& ctx);

/// K_X = -2 sigma.
DivisorClass canonical_class(const RuledSurfaceContext& ctx);

/// a > 0 and chi a + b > 0.
bool is_ample(const DivisorClass& c, const RuledSurfaceContext& ctx);
/// Positivity against sigma and phi plus positive self-intersection.
bool is_ample_nakai(const DivisorClass& c, const RuledSurfaceContext& ctx);

/// E = 3 sigma + 2(1 - 2 chi) phi, so that E + K_X = sigma + 2(1 - 2 chi) phi.
DivisorClass ample_target(const RuledSurfaceContext& ctx);

struct WitnessCertificate {
  DivisorClass target;
  DivisorClass L;
  DivisorClass four_L_plus_K;
  bool identity_holds = false;  // 4L + K_X = 2E
  bool L_ample = false;
  /// A fourth root of the torsion part always exists on the Jacobian; it has
  /// no numerical class, so only its existence is recorded.
  bool torsion_root_exists = true;
};

/// L = (2E - K_X) / 4, so that 4L + K_X (very ample by Reider) equals 2E.
/// Throws NoWitnessError when 2E - K_X is not divisible by 4 or L is not
/// ample.
WitnessCertificate reider_very_ample_witness(const DivisorClass& target, const RuledSurfaceContext& ctx);

struct DoubleCoverInvariants {
  Integer chi_cover;         // 10 chi - 4
  Integer euler_class_cover; // 2 chi
  Rational ratio;            // euler class / Euler characteristic
};

DoubleCoverInvariants double_cover_invariants(const RuledSurfaceContext& ctx);

/// K_F = K_S|_F + N_F as degrees. Exactly one argument may be missing and is
/// solved for; with all three present the identity is checked.
struct AdjunctionCertificate {
  Integer K_F;
  Integer K_S_restricted;
  Integer N_F;
  bool consistent = false;
};
AdjunctionCertificate foliation_adjunction_check(std::optional<Integer> K_F, std::optional<Integer> K_S_restricted,
                                                 std::optional<Integer> N_F);

/// -(d + 2)/(d - 1) for a degree-d foliation of P^2, d >= 2.
Rational p2_lyapunov(const Integer& d);

}  // namespace lamina
