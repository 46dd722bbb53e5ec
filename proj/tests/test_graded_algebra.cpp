#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/common.hpp"
#include "support/oracles.hpp"

using namespace grc;
using namespace grc::testing;

namespace {

const ChartPtr C = plain_chart(2, 4, 2);

int deg(const GradedPoly& f) { return *f.degree(); }

}  // namespace

TEST_CASE("normalize: odd transposition, odd square, even commutation") {
  CHECK(normalize({{{eg(1), eg(0)}, 1}}, C) == -P(C, "e1*e2"));
  CHECK(normalize({{{eg(0), eg(0)}, 5}}, C).is_zero());
  CHECK(normalize({{{pg(0), xg(0)}, 2}, {{xg(0), pg(0)}, 3}}, C) == P(C, "5*x1*p1"));
  CHECK(normalize({{{eg(2), eg(0), eg(1)}, 1}}, C) == P(C, "e1*e2*e3"));
  CHECK(normalize({{{eg(2), eg(1), eg(0)}, 1}}, C) == -P(C, "e1*e2*e3"));
}

TEST_CASE("normalize rejects unknown generators") {
  CHECK_THROWS_AS(normalize({{{eg(7)}, 1}}, C), InputError);
  CHECK_THROWS_AS(normalize({{{xg(-1)}, 1}}, C), InputError);
}

TEST_CASE("multiply") {
  CHECK(P(C, "e1") * P(C, "e2") == P(C, "e1*e2"));
  CHECK(P(C, "e2") * P(C, "e1") == -P(C, "e1*e2"));
  CHECK(P(C, "x1*e1") * P(C, "x1*e2") == P(C, "x1^2*e1*e2"));
  CHECK_THROWS_AS(P(C, "e1") * P(plain_chart(1, 1, 1), "e1"), InputError);
}

TEST_CASE("degree") {
  CHECK(degree(P(C, "x1")) == 0);
  CHECK(degree(P(C, "e1*e2")) == 2);
  CHECK(degree(P(C, "e1*p1")) == 3);
  CHECK(degree(GradedPoly(C)) == 0);
  CHECK_FALSE(degree(P(C, "x1 + e1")).has_value());
}

TEST_CASE("partial derivatives") {
  CHECK(partial_derivative(P(C, "e1*e2"), eg(0)) == P(C, "e2"));
  CHECK(partial_derivative(P(C, "e1*e2"), eg(1)) == -P(C, "e1"));
  CHECK(partial_derivative(P(C, "x1*p1^2"), pg(0)) == P(C, "2*x1*p1"));
  CHECK(partial_derivative(P(C, "x1^3*x2"), xg(0)) == P(C, "3*x1^2*x2"));
}

TEST_CASE("substitute") {
  CHECK(substitute(P(C, "x1*e1"), {{xg(0), GradedPoly(C)}}).is_zero());
  CHECK(substitute(P(C, "e1"), {{eg(0), P(C, "e2 + x1*e3")}}) == P(C, "e2 + x1*e3"));
  CHECK(substitute(P(C, "e1*e2"), {{eg(0), P(C, "e2")}}).is_zero());
  CHECK_THROWS(substitute(P(C, "e1"), {{eg(0), P(C, "x1")}}));
}

TEST_CASE("parser") {
  CHECK(P(C, "3/2 * x1^2 * e1*e3 * p2") == Rational(3) / 2 * (P(C, "x1") * P(C, "x1") * P(C, "e1") * P(C, "e3") * P(C, "p2")));
  CHECK(P(C, "-(x1 - x2)*e1") == P(C, "x2*e1 - x1*e1"));
  CHECK_THROWS_AS(P(C, "e9"), InputError);
  CHECK_THROWS_AS(P(C, "1/0"), InputError);
  CHECK_THROWS_AS(P(C, "x1 +"), InputError);
}

TEST_CASE("properties on random homogeneous inputs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int a = static_cast<int>(rng() % 5), b = static_cast<int>(rng() % 5), c = static_cast<int>(rng() % 4);
    const GradedPoly f = random_homogeneous(C, rng, a, 2), g = random_homogeneous(C, rng, b, 2),
                     h = random_homogeneous(C, rng, c, 2);
    CAPTURE(f.str());
    CAPTURE(g.str());
    // graded commutativity
    CHECK(f * g == Rational(sign(deg(f), deg(g))) * (g * f));
    CHECK((f * g) * h == f * (g * h));
    CHECK(f * (g + h) == f * g + f * h);
    // normalizing a normal form changes nothing
    std::vector<RawTerm> raw;
    for (const auto& [m, q] : f.terms()) raw.push_back({factors(m), q});
    CHECK(normalize(raw, C) == f);
    for (int mu = 0; mu < 4; ++mu) {
      CHECK(partial_derivative(partial_derivative(f, eg(mu)), eg(mu)).is_zero());
      for (int nu = 0; nu < mu; ++nu)
        CHECK(partial_derivative(partial_derivative(f, eg(mu)), eg(nu)) ==
              -partial_derivative(partial_derivative(f, eg(nu)), eg(mu)));
      // left Leibniz
      CHECK(partial_derivative(f * g, eg(mu)) ==
            partial_derivative(f, eg(mu)) * g + Rational(sign(deg(f), 1)) * (f * partial_derivative(g, eg(mu))));
    }
    CHECK(partial_derivative(f * g, pg(1)) == partial_derivative(f, pg(1)) * g + f * partial_derivative(g, pg(1)));
  }
}
