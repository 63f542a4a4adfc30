#include "lamina/surface.hpp"

#include "lamina/errors.hpp"

namespace lamina {

std::string to_string(const Integer& x) { return x.str(); }

std::string to_string(const Rational& x) {
  const Integer n = boost::multiprecision::numerator(x), d = boost::multiprecision::denominator(x);
  return d == 1 ? n.str() : n.str() + "/" + d.str();
}

std::string to_string(const DivisorClass& c) { return "(" + c.a.str() + ", " + c.b.str() + ")"; }

RuledSurfaceContext RuledSurfaceContext::for_genus(const Integer& g) {
  if (g < 2) throw ParameterError("ruled-surface calculator needs genus >= 2 (chi < 0), got " + g.str());
  return {g, 2 - 2 * g};
}

Integer intersect(const DivisorClass& c1, const DivisorClass& c2, const RuledSurfaceContext& ctx) {
  return c1.a * c2.a * ctx.chi + c1.a * c2.b + c2.a * c1.b;
}

DivisorClass canonical_class(const RuledSurfaceContext&) { return {-2, 0}; }

bool is_ample(const DivisorClass& c, const RuledSurfaceContext& ctx) { return c.a > 0 && ctx.chi * c.a + c.b > 0; }

bool is_ample_nakai(const DivisorClass& c, const RuledSurfaceContext& ctx) {
  return intersect(c, DivisorClass::sigma(), ctx) > 0 && intersect(c, DivisorClass::phi(), ctx) > 0 &&
         intersect(c, c, ctx) > 0;
}

DivisorClass ample_target(const RuledSurfaceContext& ctx) { return {3, 2 * (1 - 2 * ctx.chi)}; }

WitnessCertificate reider_very_ample_witness(const DivisorClass& target, const RuledSurfaceContext& ctx) {
  const DivisorClass K = canonical_class(ctx);
  const DivisorClass twice = Integer(2) * target - K;
  if (twice.a % 4 != 0 || twice.b % 4 != 0) {
    throw NoWitnessError("2E - K_X = " + to_string(twice) + " is not divisible by 4");
  }
  WitnessCertificate cert;
  cert.target = target;
  cert.L = {twice.a / 4, twice.b / 4};
  cert.four_L_plus_K = Integer(4) * cert.L + K;
  cert.identity_holds = cert.four_L_plus_K == Integer(2) * target;
  cert.L_ample = is_ample(cert.L, ctx);
  if (!cert.L_ample) throw NoWitnessError("L = " + to_string(cert.L) + " is not ample");
  return cert;
}

DoubleCoverInvariants double_cover_invariants(const RuledSurfaceContext& ctx) {
  DoubleCoverInvariants out;
  // Riemann-Hurwitz for the double cover of the base; the pulled-back
  // circle bundle has twice the Euler class.
  out.chi_cover = 2 * ctx.chi + 4 * (2 * ctx.chi - 1);
  out.euler_class_cover = 2 * ctx.chi;
  out.ratio = Rational(out.euler_class_cover) / Rational(out.chi_cover);
  return out;
}

AdjunctionCertificate foliation_adjunction_check(std::optional<Integer> K_F, std::optional<Integer> K_S,
                                                 std::optional<Integer> N_F) {
  const int missing = !K_F + !K_S + !N_F;
  if (missing > 1) throw ParameterError("adjunction needs at least two of K_F, K_S|_F, N_F");
  if (!K_F) K_F = *K_S + *N_F;
  if (!K_S) K_S = *K_F - *N_F;
  if (!N_F) N_F = *K_F - *K_S;
  return {*K_F, *K_S, *N_F, *K_F == *K_S + *N_F};
}

Rational p2_lyapunov(const Integer& d) {
  if (d <= 1) throw ParameterError("plane foliations need degree d >= 2");
  return -Rational(d + 2) / Rational(d - 1);
}

}  // namespace lamina
