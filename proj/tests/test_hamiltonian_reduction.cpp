#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/common.hpp"
#include "support/oracles.hpp"

using namespace grc;
using namespace grc::testing;

namespace {

Matrix zero1() { return Matrix::Zero(1, 1); }

HamAction translation(const std::string& mu = "x2") {
  const CourantScenario s = standard_theta(4);
  return from_reduction_data(s, LieAlgebra::abelian(1), {P(s.chart_ptr(), "xi1")}, {zero1()}, {P(s.chart_ptr(), mu)});
}

DGLA2Data trivial_dgla() {
  DGLA2Data d;
  d.g = LieAlgebra::abelian(1);
  d.dim_a = 2;
  d.dim_h = 1;
  d.tau = {Matrix::Zero(2, 2)};
  d.lambda = {zero1()};
  d.varpi.assign(4, Vector::Zero(1));
  d.delta_ha = mat(2, 1, {0, 1});
  d.delta_ag = mat(1, 2, {1, 0});
  return d;
}

Vector vec(std::initializer_list<long> v) { return mat(static_cast<int>(v.size()), 1, v); }

}  // namespace

TEST_CASE("Lie algebras") {
  for (const LieAlgebra& g : {LieAlgebra::so3(), LieAlgebra::heisenberg(), LieAlgebra::aff1(), LieAlgebra::abelian(2)})
    CHECK(direct_jacobi(g.dim, g.c));
  const LieAlgebra so3 = LieAlgebra::so3();
  CHECK(equal(so3.bracket(vec({1, 0, 0}), vec({0, 1, 0})), vec({0, 0, 1})));
}

TEST_CASE("graded Lie algebra checks") {
  CHECK(validate_gla(trivial_dgla()).ok());
  CHECK(validate_dgla(trivial_dgla()).ok());
  CHECK(trivial_dgla().exact());

  // so(3) with a = h = adjoint, delta = id then zero
  DGLA2Data d;
  d.g = LieAlgebra::so3();
  d.dim_a = d.dim_h = 3;
  d.tau = d.lambda = d.g.adjoint();
  d.varpi.assign(9, Vector::Zero(3));
  d.delta_ha = Matrix::Identity(3, 3);
  d.delta_ag = Matrix::Zero(3, 3);
  CHECK(validate_dgla(d).ok());
  CHECK_FALSE(d.exact());

  DGLA2Data bad = d;
  bad.g(0, 0, 1) = 1;
  bad.g(0, 1, 0) = -1;
  const CheckReport r = validate_gla(bad);
  CHECK_FALSE(r.passed("jacobi"));
  CHECK_FALSE(r.ok());
  DGLA2Data asym = d;
  asym.varpi[1] = vec({1, 0, 0});
  CHECK_FALSE(validate_gla(asym).passed("varpi symmetric"));
}

TEST_CASE("hemisemidirect products") {
  const CourantAlgebraData c = hemisemidirect(LieAlgebra::abelian(1), {mat(1, 1, {1})});
  CHECK(validate_courant_algebra(c).ok());
  CHECK(equal(c.bracket_of(vec({2, 3}), vec({5, 7})), vec({0, 14})));
  CHECK(equal(c.bracket_of(vec({5, 7}), vec({2, 3})), vec({0, 15})));
  const DGLA2Data d = courant_algebra_to_dgla(c, hemisemidirect_embedding(1, 1));
  CHECK(equal(d.varpi_of(vec({2, 3}), vec({5, 7})), vec({2 * 7 + 5 * 3})));
  CHECK(validate_dgla(d).ok());

  const CourantAlgebraData t = hemisemidirect(LieAlgebra::abelian(1), {zero1()});
  for (const auto& b : t.bracket) CHECK(is_zero(b));

  const LieAlgebra so3 = LieAlgebra::so3();
  for (const auto& module : {std::vector<Matrix>(3, Matrix::Zero(1, 1)), so3.adjoint()}) {
    const CourantAlgebraData h = hemisemidirect(so3, module);
    CHECK(validate_courant_algebra(h).ok());
    const DGLA2Data back = courant_algebra_to_dgla(h);
    CHECK(validate_gla(back).ok());
    CHECK(validate_dgla(back).ok());
    CHECK(same_courant_algebra(dgla_to_courant_algebra(back), h));
  }
  CHECK_THROWS_AS(hemisemidirect(so3, {mat(1, 1, {1}), zero1(), zero1()}), DomainError);
  CHECK_THROWS_AS(dgla_to_courant_algebra(d.exact() ? [] {
    DGLA2Data x = trivial_dgla();
    x.delta_ag = mat(1, 2, {0, 0});
    return x;
  }() : d), DomainError);
}

TEST_CASE("round trips on random exact Courant algebras") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 40; ++t) {
    const CourantAlgebraData c = random_exact_courant_algebra(rng, 4);
    CHECK(validate_courant_algebra(c).ok());
    const DGLA2Data d = courant_algebra_to_dgla(c);
    CHECK(d.exact());
    CHECK(validate_dgla(d).ok());
    const CourantAlgebraData c2 = dgla_to_courant_algebra(d);
    CHECK(same_courant_algebra(c, c2));
    CHECK(same_dgla(courant_algebra_to_dgla(c2, d.delta_ha), d));
  }
}

TEST_CASE("comoment and chain conditions") {
  const HamAction A = translation();
  CHECK(validate_comoment(A).ok());
  CHECK(validate_chain(A).ok());
  CHECK(A.rho_a[0] == P(A.scenario.chart_ptr(), "xi1"));
  CHECK(A.rho_a[1] == P(A.scenario.chart_ptr(), "v2"));
  CHECK(A.phi[0] == poisson(A.scenario.bracket(), A.scenario.theta(), P(A.scenario.chart_ptr(), "xi1")));

  HamAction noD = A;
  noD.rho_a[1] = noD.scenario.zero();
  // brackets alone cannot see the missing d(mu* h); the chain identity rho(delta h) = {Theta, mu* h} does
  CHECK(validate_comoment(noD).ok());
  const CheckReport c = validate_chain(noD);
  CHECK_FALSE(c.passed("(a)"));
  CHECK_FALSE(c.passed("symbolic"));
  HamAction noPair = A;
  noPair.rho_a[1] = P(A.scenario.chart_ptr(), "v2 + v1");
  CHECK_FALSE(validate_comoment(noPair).ok());

  HamAction twist = A;
  twist.phi[0] += P(A.scenario.chart_ptr(), "x3*v1*v2");
  CHECK_FALSE(validate_chain(twist).passed("(c)"));
  CHECK_FALSE(validate_chain(twist).passed("symbolic"));

  const CourantScenario s = standard_theta(1);
  HamAction zero{s, courant_algebra_to_dgla(hemisemidirect(LieAlgebra::abelian(1), {zero1()})),
                 {s.zero()}, {s.zero(), s.zero()}, {s.zero()}};
  CHECK(validate_comoment(zero).ok());
  CHECK(validate_chain(zero).ok());
}

TEST_CASE("regular values and zero levels") {
  CHECK(regular_zero(translation(), 3, 3).ok());
  const RegularityReport sq = regular_zero(translation("x2^2"), 3, 3);
  CHECK_FALSE(sq.moment);
  const GeometricCoisoData d = zero_level_data(translation());
  CHECK(d.A == std::vector<int>{1});
  CHECK(d.C == std::vector<int>{0});
  const ChartPtr c = standard_chart(4);
  const CoisotropicIdeal I = ideal_from_data(standard_bracket(4), d);
  CHECK(I.contains(P(c, "xi1")));
  CHECK(I.contains(P(c, "v2")));
  CHECK(d.K.size() == 2);

  const CourantScenario s = standard_theta(4);
  const HamAction pure = from_reduction_data(s, LieAlgebra::abelian(1), {P(c, "xi1")}, {Matrix(0, 0)}, {});
  CHECK(regular_zero(pure, 3, 3).ok());
  const GeometricCoisoData dp = zero_level_data(pure);
  CHECK(dp.A.empty());
  CHECK(dp.K.size() == 1);

  CourantAlgebraData honly;
  honly.g = LieAlgebra::abelian(0);
  honly.dim_a = 1;
  honly.bracket = {Vector::Zero(1)};
  honly.p = Matrix(0, 1);
  const HamAction level{s, courant_algebra_to_dgla(honly), {}, {P(c, "v1")}, {P(c, "x1")}};
  CHECK(validate_comoment(level).ok());
  CHECK(validate_chain(level).ok());
  const GeometricCoisoData dl = zero_level_data(level);
  CHECK(dl.A == std::vector<int>{0});
  REQUIRE(dl.K.size() == 1);
  CHECK(ideal_from_data(standard_bracket(4), dl).contains(P(c, "v1")));
  CHECK_THROWS_AS(zero_level_coordinates(*c, {P(c, "x1 + x2^2 - 1")}), DomainError);
}

TEST_CASE("reduction data preconditions") {
  const CourantScenario s = standard_theta(2);
  const ChartPtr& c = s.chart_ptr();
  CHECK_THROWS_AS(from_reduction_data(s, LieAlgebra::abelian(1), {P(c, "xi1 + v1")}, {Matrix(0, 0)}, {}), DomainError);
  CHECK_THROWS_AS(from_reduction_data(s, LieAlgebra::abelian(1), {P(c, "xi1")}, {zero1()}, {P(c, "x1")}), DomainError);
  CHECK(left_central_check(s));
  CHECK_FALSE(left_central_check(CourantScenario(s.bracket_ptr(), s.theta() + P(c, "x1*v1*v2*xi1"))));
}

TEST_CASE("extended actions") {
  const CourantScenario s = standard_theta(4);
  const ChartPtr& c = s.chart_ptr();
  const CourantAlgebraData a = hemisemidirect(LieAlgebra::abelian(1), {zero1()});
  const ExtendedActionReport ok = extended_action_check(s, a, {P(c, "xi1"), P(c, "v2")}, {P(c, "x2")}, 5);
  CHECK(ok.checks.ok());
  CHECK(ok.extracond);
  CHECK(ok.isotropic);
  const ExtendedActionReport drop = extended_action_check(s, a, {P(c, "xi1"), s.zero()}, {P(c, "x2")}, 5);
  CHECK_FALSE(drop.checks.ok());
  CHECK_FALSE(drop.checks.passed("closed on h"));

  CourantAlgebraData honly;
  honly.g = LieAlgebra::abelian(0);
  honly.dim_a = 1;
  honly.bracket = {Vector::Zero(1)};
  honly.p = Matrix(0, 1);
  CHECK(extended_action_check(s, honly, {P(c, "v2")}, {P(c, "x2")}, 5).checks.ok());
  CHECK_FALSE(extended_action_check(s, honly, {P(c, "x1*v2")}, {P(c, "x2")}, 5).checks.ok());
}

TEST_CASE("hamiltonian reduction") {
  const HamAction A = translation();
  const HamReduction hr = ham_reduce(A, {});
  const CourantScenario& r = hr.reduction.scenario();
  CHECK(r.theta() == P(r.chart_ptr(), "v3*p3 + v4*p4"));
  CHECK(hr.exactness.both());
  const Reduction direct = reduce(A.scenario, zero_level_data(A));
  CHECK(direct.scenario().theta() == r.theta());
  CHECK(*direct.scenario().chart_ptr() == *r.chart_ptr());

  const CourantScenario s = standard_theta(4);
  const ChartPtr& c = s.chart_ptr();
  const GradedPoly Jw = quadratic_from_endomorphism(s.bracket(), gc_symplectic(mat(4, 4, {0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0})));
  const HamAction mw = from_reduction_data(s, LieAlgebra::abelian(1), {P(c, "xi1")}, {zero1()}, {P(c, "x3")});
  HamReduceOptions o;
  o.J = Jw;
  const HamReduction mr = ham_reduce(mw, o);
  REQUIRE(mr.J);
  CHECK(mr.J->J_red == P(mr.reduction.scenario().chart_ptr(), "-v2*v4 - xi2*xi4"));
  CHECK(mr.J->reduced_check.ok());
  // the same J is not invariant for a rotation-like action
  HamReduceOptions wrong;
  wrong.J = Jw + P(c, "x1*v1*v2");
  CHECK_THROWS(ham_reduce(mw, wrong));

  const CourantScenario s3 = standard_theta(3);
  const ChartPtr& c3 = s3.chart_ptr();
  const HamAction dir = from_reduction_data(s3, LieAlgebra::abelian(1), {P(c3, "xi3")}, {Matrix(0, 0)}, {});
  HamReduceOptions od;
  od.L = std::vector<GradedPoly>{P(c3, "xi1 + v2"), P(c3, "xi2 - v1"), P(c3, "xi3")};
  const HamReduction dr = ham_reduce(dir, od);
  REQUIRE(dr.L);
  CHECK(dr.L->lagrangian);
  CHECK(dr.L->involutive);
  const Matrix F = frame_matrix(dr.L->frame, {R(0), R(0)});
  const Matrix E = frame_matrix({P(dr.reduction.scenario().chart_ptr(), "xi1 + v2"), P(dr.reduction.scenario().chart_ptr(), "xi2 - v1")}, {R(0), R(0)});
  Matrix both(4, F.cols());
  both << F, E;
  CHECK(rank(both) == 2);
}
