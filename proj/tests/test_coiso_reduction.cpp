#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/common.hpp"
#include "support/oracles.hpp"

using namespace grc;
using namespace grc::testing;

namespace {

GradedPoly G(const CourantScenario& s, const std::string& t) { return P(s.chart_ptr(), t); }

std::vector<GradedPoly> frame(const ChartPtr& c, const std::string& semi) {
  std::vector<GradedPoly> out;
  std::stringstream ss(semi);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(P(c, item));
  return out;
}

bool same_span(const std::vector<GradedPoly>& a, const std::vector<GradedPoly>& b, const std::vector<Rational>& pt) {
  const Matrix A = frame_matrix(a, pt), B = frame_matrix(b, pt);
  Matrix both(A.rows() + B.rows(), A.cols());
  both << A, B;
  return rank(A) == rank(B) && rank(both) == rank(A);
}

GeometricCoisoData data(std::vector<int> A, std::vector<GradedPoly> K, std::vector<int> C) {
  return GeometricCoisoData{std::move(A), std::move(K), std::move(C), std::nullopt};
}

}  // namespace

TEST_CASE("ideals from geometric data") {
  const CourantScenario s = standard_theta(2);
  const CoisotropicIdeal tr = ideal_from_data(s.bracket_ptr(), data({}, {G(s, "xi1")}, {0}));
  CHECK(tr.generators().size() == 2);
  CHECK(tr.contains(G(s, "xi1")));
  CHECK(tr.contains(G(s, "p1")));
  CHECK(is_coisotropic(tr));
  // lagrangian over N = {x1 = 0}: K = Ann(TN) + F with F = d/dx2
  const CoisotropicIdeal lag = ideal_from_data(s.bracket_ptr(), data({0}, {G(s, "v1"), G(s, "xi2")}, {1}));
  for (const char* g : {"x1", "v1", "xi2", "p2"}) CHECK(lag.contains(G(s, g)));
  CHECK(is_coisotropic(lag));
  CHECK(lag.total_dimension() == 1 + 2 + 1);
  const CoisotropicIdeal triv = ideal_from_data(s.bracket_ptr(), data({}, {}, {}));
  CHECK(triv.generators().empty());
  CHECK_THROWS_AS(ideal_from_data(s.bracket_ptr(), data({}, {G(s, "v1"), G(s, "xi1")}, {})), DomainError);
}

TEST_CASE("normal forms and brackets modulo the ideal") {
  const CourantScenario s = standard_theta(2);
  const CoisotropicIdeal I = ideal_from_data(s.bracket_ptr(), data({}, {G(s, "xi1")}, {0}));
  CHECK(I.normal_form(G(s, "p1 + x2*xi1")).is_zero());
  CHECK(I.normal_form(G(s, "p2")) == G(s, "p2"));
  CHECK(I.normal_form(G(s, "v1*xi1")).is_zero());
  CHECK(I.normal_form(I.normal_form(G(s, "x1*p1 + v1*v2 + xi1*xi2"))) == I.normal_form(G(s, "x1*p1 + v1*v2 + xi1*xi2")));
  CHECK(in_normalizer(G(s, "x2"), I));
  CHECK_FALSE(in_normalizer(G(s, "x1"), I));
  CHECK(in_normalizer(G(s, "x2*xi1 + p1"), I));
}

TEST_CASE("coisotropy verdicts") {
  const auto b = standard_bracket(2);
  const ChartPtr& c = b->chart_ptr();
  CHECK_FALSE(is_coisotropic(CoisotropicIdeal(b, {0}, {}, {P(c, "p1")})));
  CHECK_FALSE(is_coisotropic(CoisotropicIdeal(b, {}, {P(c, "v1"), P(c, "xi1")})));
  CHECK(is_coisotropic(CoisotropicIdeal(b, {}, {P(c, "v1"), P(c, "v2")})));
}

TEST_CASE("reducibility") {
  const CourantScenario s = standard_theta(2);
  const auto tr = data({}, {G(s, "xi1")}, {0});
  CHECK(reducible_symbolic(s, ideal_from_data(s.bracket_ptr(), tr)));
  CHECK(reducible_geometric(s, tr, 1).all());
  const auto lag = data({0}, {G(s, "v1"), G(s, "xi2")}, {1});
  CHECK(reducible_symbolic(s, ideal_from_data(s.bracket_ptr(), lag)));
  CHECK(reducible_geometric(s, lag, 1).all());
  // rho(K) outside F
  const auto bad = data({}, {G(s, "xi1")}, {});
  const ReducibilityReport r = reducible_geometric(s, bad, 1);
  CHECK_FALSE(r.r[1]);
  CHECK_FALSE(r.witness[1].empty());
  CHECK_FALSE(reducible_symbolic(s, ideal_from_data(s.bracket_ptr(), bad)));
  // twisted: xi1 contracts chi into v2 v3, which leaves K unless K holds v2 or v3
  const ChartPtr c3 = standard_chart(3);
  const CourantScenario t = twisted_theta(3, three_form(c3, 3, {{{0, 1, 2}, P(c3, "1")}}));
  for (const auto& d : {data({}, {G(t, "xi1")}, {0}), data({}, {G(t, "xi1"), G(t, "v2")}, {0})}) {
    const bool sym = reducible_symbolic(t, ideal_from_data(t.bracket_ptr(), d));
    CHECK(sym == reducible_geometric(t, d, 2).all());
  }
  CHECK_FALSE(reducible_symbolic(t, ideal_from_data(t.bracket_ptr(), data({}, {G(t, "xi1")}, {0}))));
}

TEST_CASE("coisotropic reduction") {
  const CourantScenario s = standard_theta(3);
  const Reduction red = reduce(s, data({}, {G(s, "xi1")}, {0}));
  const CourantScenario& r = red.scenario();
  CHECK(r.chart().n_x() == 2);
  CHECK(r.theta() == P(r.chart_ptr(), "v2*p2 + v3*p3"));
  CHECK(master_equation(r));
  CHECK(red.project(G(s, "x2*v3 + xi1")) == P(r.chart_ptr(), "x2*v3"));
  CHECK_THROWS_AS(red.project(G(s, "x1")), DomainError);

  const CourantScenario s2 = standard_theta(2);
  const Reduction res = reduce(s2, data({0}, {G(s2, "v1")}, {}));
  CHECK(res.scenario().chart().n_x() == 1);
  CHECK(res.scenario().chart().n_e() == 2);
  CHECK(res.scenario().theta() == P(res.scenario().chart_ptr(), "v2*p2"));

  const Reduction same = reduce(s2, data({}, {}, {}));
  CHECK(same.scenario().theta() == P(same.scenario().chart_ptr(), "v1*p1 + v2*p2"));
  CHECK_THROWS_AS(reduce(s2, data({}, {G(s2, "xi1")}, {})), DomainError);
}

TEST_CASE("generalized complex reduction") {
  const CourantScenario s = standard_theta(4);
  const GradedPoly Jw = quadratic_from_endomorphism(s.bracket(), gc_symplectic(mat(4, 4, {0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0})));
  const auto mw = data({2}, {G(s, "xi1"), G(s, "v3")}, {0});
  const Reduction red = reduce(s, mw);
  const QuadraticReduction q = reduce_quadratic(s, Jw, mw, red);
  CHECK(q.normalizer);
  CHECK(q.preserves_K);
  CHECK(q.preserves_flat);
  CHECK(q.reduced_check.ok());
  const CourantScenario& r = red.scenario();
  CHECK(q.J_red == P(r.chart_ptr(), "-v2*v4 - xi2*xi4"));
  const GradedPoly expected = quadratic_from_endomorphism(r.bracket(), gc_symplectic(mat(2, 2, {0, 1, -1, 0})));
  CHECK(q.J_red == expected);

  const GradedPoly Jc = quadratic_from_endomorphism(s.bracket(), gc_complex(mat(4, 4, {0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0})));
  const auto hol = data({}, {G(s, "xi1"), G(s, "xi2")}, {0, 1});
  const Reduction hred = reduce(s, hol);
  const QuadraticReduction hq = reduce_quadratic(s, Jc, hol, hred);
  CHECK(hq.reduced_check.ok());
  const CourantScenario& hr = hred.scenario();
  CHECK(hq.J_red == quadratic_from_endomorphism(hr.bracket(), gc_complex(mat(2, 2, {0, -1, 1, 0}))));

  const Reduction none = reduce(s, data({}, {}, {}));
  CHECK(reduce_quadratic(s, Jw, data({}, {}, {}), none).J_red == P(none.scenario().chart_ptr(), Jw.str()));
  // J_omega moves xi1 to v3, outside this K
  const auto off = data({}, {G(s, "xi1"), G(s, "xi2")}, {0, 1});
  CHECK_THROWS_AS(reduce_quadratic(s, Jw, off, reduce(s, off)), DomainError);
}

TEST_CASE("Dirac reduction") {
  const CourantScenario s = standard_theta(3);
  const auto L = frame(s.chart_ptr(), "xi1 + v2; xi2 - v1; xi3");
  const auto d = data({}, {G(s, "xi3")}, {2});
  const CoisotropicIdeal I = ideal_from_data(s.bracket_ptr(), d);
  const auto pts = sample_points(s.chart(), d.A, 4, 3);
  const CleanReport clean = clean_intersection(L, d, I, pts);
  CHECK(clean.ok());
  for (int r : clean.ranks) CHECK(r == 1);
  CHECK(is_involutive(s, L));
  const Reduction red = reduce(s, d);
  const DiracReduction dr = reduce_dirac(L, s, d, red, pts);
  CHECK(dr.lagrangian);
  CHECK(dr.involutive);
  CHECK(same_span(dr.frame, frame(red.scenario().chart_ptr(), "v2 + xi1; -v1 + xi2"), {R(0), R(0)}));

  const auto TM = frame(s.chart_ptr(), "xi1; xi2; xi3");
  const DiracReduction tm = reduce_dirac(TM, s, d, red, pts);
  CHECK(same_span(tm.frame, frame(red.scenario().chart_ptr(), "xi1; xi2"), {R(0), R(0)}));
  CHECK(clean_intersection(L, data({}, {}, {}), ideal_from_data(s.bracket_ptr(), data({}, {}, {})), pts).ok());

  const CourantScenario s4 = standard_theta(4);
  const auto Lp = frame(s4.chart_ptr(), "v1 + xi2; v2 - xi1; v3 + xi4; v4 - xi3");
  const auto dp = data({2}, {G(s4, "v3"), G(s4, "xi4")}, {3});
  const Reduction pred = reduce(s4, dp);
  const DiracReduction pr = reduce_dirac(Lp, s4, dp, pred, sample_points(s4.chart(), dp.A, 4, 3));
  CHECK(pr.lagrangian);
  CHECK(pr.involutive);
  CHECK(same_span(pr.frame, frame(pred.scenario().chart_ptr(), "v1 + xi2; v2 - xi1"), {R(0), R(0)}));
  // graph of x3 dx1^dx2 is lagrangian but not closed
  CHECK_FALSE(is_involutive(s, frame(s.chart_ptr(), "xi1 + x3*v2; xi2 - x3*v1; xi3")));
}

TEST_CASE("symbolic and geometric reducibility agree on random data") {
  std::mt19937_64 rng(404);
  int done = 0, tries = 0;
  while (done < 25 && tries < 500) {
    ++tries;
    const auto inst = random_coiso_instance(rng);
    if (!inst) continue;
    ++done;
    CAPTURE(inst->description);
    CHECK(inst->symbolic == inst->geometric.all());
  }
  CHECK(done == 25);
}
