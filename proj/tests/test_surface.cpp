#include <doctest.h>

#include <random>

#include "lamina/errors.hpp"
#include "lamina/surface.hpp"

using namespace lamina;

TEST_CASE("intersection form") {
  const auto ctx = RuledSurfaceContext::for_genus(2);
  const DivisorClass s = DivisorClass::sigma(), f = DivisorClass::phi();
  CHECK(intersect(s, s, ctx) == -2);
  CHECK(intersect(s, f, ctx) == 1);
  CHECK(intersect(f, f, ctx) == 0);
  CHECK_THROWS_AS(RuledSurfaceContext::for_genus(1), ParameterError);

  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> d(-50, 50);
  for (int g = 2; g <= 20; ++g) {
    const auto c = RuledSurfaceContext::for_genus(g);
    for (int k = 0; k < 50; ++k) {
      const DivisorClass x{d(gen), d(gen)}, y{d(gen), d(gen)}, z{d(gen), d(gen)};
      const Integer n = d(gen);
      CHECK(intersect(x, y, c) == intersect(y, x, c));
      CHECK(intersect(x + y, z, c) == intersect(x, z, c) + intersect(y, z, c));
      CHECK(intersect(n * x, z, c) == n * intersect(x, z, c));
      CHECK(is_ample(x, c) == is_ample_nakai(x, c));
    }
  }
}

TEST_CASE("ampleness") {
  for (int g = 2; g <= 50; ++g) {
    const auto ctx = RuledSurfaceContext::for_genus(g);
    const DivisorClass K = canonical_class(ctx);
    CHECK(K == DivisorClass{-2, 0});
    CHECK(is_ample(ample_target(ctx) + K, ctx));
  }
  const auto ctx = RuledSurfaceContext::for_genus(2);
  CHECK((ample_target(ctx) + canonical_class(ctx)) == DivisorClass{1, 10});
  CHECK(!is_ample(canonical_class(ctx), ctx));
  CHECK(!is_ample(DivisorClass::phi(), ctx));
}

TEST_CASE("very ample witness") {
  const auto c2 = RuledSurfaceContext::for_genus(2);
  const WitnessCertificate w2 = reider_very_ample_witness(ample_target(c2), c2);
  CHECK(w2.L == DivisorClass{2, 5});
  CHECK(w2.four_L_plus_K == DivisorClass{6, 20});
  CHECK(w2.identity_holds);

  const auto c3 = RuledSurfaceContext::for_genus(3);
  const WitnessCertificate w3 = reider_very_ample_witness(ample_target(c3), c3);
  CHECK(w3.L == DivisorClass{2, 9});
  CHECK(w3.identity_holds);
  CHECK(w3.L_ample);

  for (int g = 2; g <= 200; ++g) {
    const auto c = RuledSurfaceContext::for_genus(g);
    CHECK(is_ample(reider_very_ample_witness(ample_target(c), c).L, c));
  }
  CHECK_THROWS_AS(reider_very_ample_witness({1, 0}, c2), NoWitnessError);
}

TEST_CASE("double cover invariants") {
  const auto d2 = double_cover_invariants(RuledSurfaceContext::for_genus(2));
  CHECK(d2.chi_cover == -24);
  CHECK(d2.euler_class_cover == -4);
  CHECK(d2.ratio == Rational(1, 6));
  CHECK(to_string(d2.ratio) == "1/6");
  CHECK(double_cover_invariants(RuledSurfaceContext::for_genus(11)).ratio == Rational(10, 51));

  Rational prev = d2.ratio;
  for (int g = 3; g <= 1000; ++g) {
    const Rational r = double_cover_invariants(RuledSurfaceContext::for_genus(g)).ratio;
    CHECK(r > prev);
    CHECK(r < Rational(1, 5));
    prev = r;
  }
  const Rational big = double_cover_invariants(RuledSurfaceContext::for_genus(1000000)).ratio;
  CHECK(Rational(1, 5) - big < Rational(1, 1000000));
  CHECK(big > prev);
}

TEST_CASE("adjunction") {
  for (int d = 2; d <= 10; ++d) {
    const AdjunctionCertificate c = foliation_adjunction_check(Integer(d - 1), std::nullopt, Integer(d + 2));
    CHECK(c.K_S_restricted == -3);
    CHECK(c.consistent);
  }
  CHECK(foliation_adjunction_check(std::nullopt, Integer(4), Integer(0)).K_F == 4);
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> d(-1000, 1000);
  for (int k = 0; k < 100; ++k) {
    const Integer a = d(gen), b = d(gen);
    CHECK(foliation_adjunction_check(a + b, a, b).consistent);
    CHECK(!foliation_adjunction_check(a + b + 1, a, b).consistent);
  }
  CHECK_THROWS_AS(foliation_adjunction_check(std::nullopt, std::nullopt, Integer(1)), ParameterError);
}

TEST_CASE("plane foliation exponents") {
  CHECK(p2_lyapunov(2) == Rational(-4));
  CHECK(p2_lyapunov(5) == Rational(-7, 4));
  CHECK(to_string(p2_lyapunov(5)) == "-7/4");
  Rational prev = p2_lyapunov(2);
  for (int d = 3; d <= 10000; ++d) {
    const Rational l = p2_lyapunov(d);
    CHECK(l > prev);
    CHECK(l < Rational(-1));
    prev = l;
  }
  CHECK_THROWS_AS(p2_lyapunov(1), ParameterError);
}
