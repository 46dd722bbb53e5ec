#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/common.hpp"
#include "support/oracles.hpp"

using namespace grc;
using namespace grc::testing;

namespace {

struct Family {
  const char* name;
  BracketPtr b;
};

std::vector<Family> families() {
  Matrix g = Matrix::Zero(3, 3);
  g(0, 0) = 1;
  g(1, 1) = -1;
  g(2, 2) = 2;
  g(0, 2) = g(2, 0) = R(1, 2);
  return {{"standard", standard_bracket(2)},
          {"generic", std::make_shared<const BracketData>(plain_chart(2, 3, 2), g)},
          {"algebroid", std::make_shared<const BracketData>(algebroid_chart(1, 2), hyperbolic_metric(2))}};
}

int deg(const GradedPoly& f) { return *f.degree(); }

}  // namespace

TEST_CASE("generator relations") {
  const auto b = standard_bracket(2);
  const ChartPtr& c = b->chart_ptr();
  CHECK(poisson(*b, P(c, "p1"), P(c, "x1")) == P(c, "1"));
  CHECK(poisson(*b, P(c, "x1"), P(c, "p1")) == P(c, "-1"));
  CHECK(poisson(*b, P(c, "x1"), P(c, "x2")).is_zero());
  CHECK(poisson(*b, P(c, "v1"), P(c, "xi1")) == P(c, "1"));
  CHECK(poisson(*b, P(c, "v1"), P(c, "v1")).is_zero());
  CHECK(poisson(*b, P(c, "v1*p1"), P(c, "x1")) == P(c, "v1"));
  CHECK(leibniz_bracket(*b, P(c, "v1*p1"), P(c, "x1")) == P(c, "v1"));
}

TEST_CASE("hamiltonian fields") {
  const auto b = standard_bracket(2);
  const ChartPtr& c = b->chart_ptr();
  CHECK(hamiltonian_field(*b, P(c, "p1"))(P(c, "x1")) == P(c, "1"));
  CHECK(hamiltonian_field(*b, P(c, "x1"))(P(c, "p1")) == P(c, "-1"));
  const BracketData id(plain_chart(1, 1, 1), Matrix::Identity(1, 1));
  CHECK(hamiltonian_field(id, P(id.chart_ptr(), "e1"))(P(id.chart_ptr(), "e1")) == P(id.chart_ptr(), "1"));
  CHECK_THROWS(hamiltonian_field(*b, P(c, "x1 + p1")));
}

TEST_CASE("nondegeneracy and construction errors") {
  const auto b = standard_bracket(3);
  CHECK(nondegeneracy_check(*b, {R(0), R(1), R(-2, 3)}));
  CHECK_THROWS(BracketData(plain_chart(2, 2, 2), Matrix::Zero(2, 2)));
  CHECK_THROWS(BracketData(plain_chart(2, 2, 1), hyperbolic_metric(1)));
  CHECK_THROWS(BracketData(plain_chart(1, 2, 1), mat(2, 2, {0, 1, 2, 0})));
}

TEST_CASE("exp_adjoint") {
  const auto b = standard_bracket(2);
  const ChartPtr& c = b->chart_ptr();
  CHECK(exp_adjoint(*b, GradedPoly(c), P(c, "xi1 + x2*v1")) == P(c, "xi1 + x2*v1"));
  const GradedPoly B = P(c, "v1*v2");
  const GradedPoly xi1 = P(c, "xi1");
  CHECK(exp_adjoint(*b, B, xi1) == xi1 + leibniz_bracket(*b, B, xi1));
  CHECK(exp_adjoint(*b, B, xi1) == P(c, "xi1 - v2"));
  CHECK(exp_adjoint(*b, B, P(c, "x1")) == P(c, "x1"));
  // x1*p1 generates a scaling flow that never terminates on x1
  CHECK_THROWS_AS(exp_adjoint(*b, P(c, "x1*p1"), P(c, "x1")), DomainError);
}

TEST_CASE("bracket axioms and the recursive Leibniz oracle per chart family") {
  std::mt19937_64 rng(77);
  for (const auto& fam : families()) {
    CAPTURE(fam.name);
    const BracketData& b = *fam.b;
    const ChartPtr& c = b.chart_ptr();
    for (int trial = 0; trial < 60; ++trial) {
      const GradedPoly f = random_homogeneous(c, rng, static_cast<int>(rng() % 5), 2);
      const GradedPoly g = random_homogeneous(c, rng, static_cast<int>(rng() % 5), 2);
      const GradedPoly h = random_homogeneous(c, rng, static_cast<int>(rng() % 4), 1, 2);
      const int df = deg(f), dg = deg(g);
      const GradedPoly fg = poisson(b, f, g);
      CAPTURE(f.str());
      CAPTURE(g.str());
      CHECK(fg == leibniz_bracket(b, f, g));
      if (!fg.is_zero()) CHECK(deg(fg) == df + dg - 2);
      CHECK((fg + Rational(sign(df - 2, dg - 2)) * poisson(b, g, f)).is_zero());
      CHECK(poisson(b, f, g * h) == poisson(b, f, g) * h + Rational(sign(df, dg)) * (g * poisson(b, f, h)));
      CHECK(poisson(b, f, poisson(b, g, h)) ==
            poisson(b, poisson(b, f, g), h) + Rational(sign(df - 2, dg - 2)) * poisson(b, g, poisson(b, f, h)));
    }
  }
}

TEST_CASE("hamiltonian fields of brackets are commutators") {
  std::mt19937_64 rng(5);
  const auto b = standard_bracket(2);
  const ChartPtr& c = b->chart_ptr();
  std::vector<GradedPoly> gens;
  for (GenKind k : {GenKind::X, GenKind::E, GenKind::P})
    for (int i = 0; i < c->count(k); ++i) gens.push_back(GradedPoly::generator(c, {k, i}));
  for (int trial = 0; trial < 30; ++trial) {
    const GradedPoly f = random_homogeneous(c, rng, 1 + static_cast<int>(rng() % 3), 2);
    const GradedPoly g = random_homogeneous(c, rng, 1 + static_cast<int>(rng() % 3), 2);
    const auto Xf = hamiltonian_field(*b, f), Xg = hamiltonian_field(*b, g);
    const auto Xfg = hamiltonian_field(*b, poisson(*b, f, g));
    for (const auto& k : gens)
      CHECK(Xfg(k) == Xf(Xg(k)) - Rational(sign(deg(f) - 2, deg(g) - 2)) * Xg(Xf(k)));
  }
}
