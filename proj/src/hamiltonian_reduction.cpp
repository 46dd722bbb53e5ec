#include "grc/hamiltonian_reduction.hpp"

#include "grc/exact_linalg.hpp"

#include <algorithm>
#include <sstream>

namespace grc {

namespace {

Vector unit(int n, int i) {
  Vector v = Vector::Zero(n);
  v(i) = 1;
  return v;
}

std::string vec_str(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v(i).str();
  return s + ")";
}

std::string idx(std::initializer_list<int> l) {
  std::string s = "(";
  bool first = true;
  for (int i : l) {
    s += (first ? "" : ", ") + std::to_string(i + 1);
    first = false;
  }
  return s + ")";
}

GradedPoly combine(const std::vector<GradedPoly>& images, const Vector& coeffs, const ChartPtr& chart) {
  GradedPoly out(chart);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    if (coeffs(i) != 0) out += coeffs(i) * images[static_cast<std::size_t>(i)];
  return out;
}

bool member(const std::vector<int>& v, int i) { return std::find(v.begin(), v.end(), i) != v.end(); }

// phi(u) applied classically: through its values on the generators x^i and e^mu.
struct Derivation {
  std::vector<GradedPoly> on_x, on_e;

  Derivation(const BracketData& b, const GradedPoly& D) {
    const ChartPtr& c = b.chart_ptr();
    for (int i = 0; i < c->n_x(); ++i) on_x.push_back(poisson(b, D, GradedPoly::generator(c, xg(i))));
    for (int m = 0; m < c->n_e(); ++m) on_e.push_back(poisson(b, D, GradedPoly::generator(c, eg(m))));
  }
  GradedPoly function(const GradedPoly& f) const {
    GradedPoly out(f.chart_ptr());
    for (std::size_t i = 0; i < on_x.size(); ++i)
      if (!on_x[i].is_zero()) out += on_x[i] * partial_derivative(f, xg(static_cast<int>(i)));
    return out;
  }
  GradedPoly section(const GradedPoly& e) const {
    const auto c = linear_coefficients(e);
    GradedPoly out(e.chart_ptr());
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (c[m].is_zero()) continue;
      out += function(c[m]) * GradedPoly::generator(e.chart_ptr(), eg(static_cast<int>(m)));
      out += c[m] * on_e[m];
    }
    return out;
  }
};

GradedPoly classical_pairing(const BracketData& b, const GradedPoly& e1, const GradedPoly& e2) {
  const auto c1 = linear_coefficients(e1), c2 = linear_coefficients(e2);
  GradedPoly out(e1.chart_ptr());
  for (std::size_t m = 0; m < c1.size(); ++m)
    for (std::size_t n = 0; n < c2.size(); ++n) {
      const Rational& g = b.metric()(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      if (g != 0 && !c1[m].is_zero() && !c2[n].is_zero()) out += g * (c1[m] * c2[n]);
    }
  return out;
}

// rho^* df = sum g^{-1}_{mu nu} (rho(e^nu) f) e^mu
GradedPoly rho_star_d(const CourantScenario& s, const GradedPoly& f) {
  const int m1 = s.chart().n_e();
  std::vector<GradedPoly> r;
  for (int n = 0; n < m1; ++n) r.push_back(anchor_apply(s, s.gen(eg(n)), f));
  GradedPoly out = s.zero();
  const Matrix& gi = s.bracket().metric_inverse();
  for (int m = 0; m < m1; ++m)
    for (int n = 0; n < m1; ++n)
      if (gi(m, n) != 0 && !r[n].is_zero()) out += gi(m, n) * r[n] * s.gen(eg(m));
  return out;
}

void require_size(std::size_t got, int want, const char* what) {
  if (static_cast<int>(got) != want) throw InputError(std::string(what) + ": expected " + std::to_string(want) + " entries");
}

}  // namespace

Vector LieAlgebra::bracket(const Vector& u, const Vector& v) const {
  Vector w = Vector::Zero(dim);
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i) {
      if (u(i) == 0) continue;
      for (int j = 0; j < dim; ++j)
        if (v(j) != 0 && (*this)(k, i, j) != 0) w(k) += (*this)(k, i, j) * u(i) * v(j);
    }
  return w;
}

std::vector<Matrix> LieAlgebra::adjoint() const {
  std::vector<Matrix> out;
  for (int i = 0; i < dim; ++i) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k)
      for (int j = 0; j < dim; ++j) m(k, j) = (*this)(k, i, j);
    out.push_back(m);
  }
  return out;
}

LieAlgebra LieAlgebra::so3() {
  LieAlgebra g(3);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    g(k, i, j) = 1;
    g(k, j, i) = -1;
  }
  return g;
}

LieAlgebra LieAlgebra::heisenberg() {
  LieAlgebra g(3);
  g(2, 0, 1) = 1;
  g(2, 1, 0) = -1;
  return g;
}

LieAlgebra LieAlgebra::aff1() {
  LieAlgebra g(2);
  g(1, 0, 1) = 1;
  g(1, 1, 0) = -1;
  return g;
}

bool CheckReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void CheckReport::fail(const std::string& name, const std::string& witness) {
  for (auto& c : checks)
    if (c.name == name) {
      if (c.pass) {
        c.pass = false;
        c.witness = witness;
      }
      return;
    }
  checks.push_back({name, false, witness});
}

void CheckReport::pass(const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return;
  checks.push_back({name, true, {}});
}

bool CheckReport::passed(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c.pass;
  return true;
}

Matrix DGLA2Data::tau_of(const Vector& u) const {
  Matrix m = Matrix::Zero(dim_a, dim_a);
  for (int i = 0; i < g.dim; ++i)
    if (u(i) != 0) m += u(i) * tau[i];
  return m;
}

Matrix DGLA2Data::lambda_of(const Vector& u) const {
  Matrix m = Matrix::Zero(dim_h, dim_h);
  for (int i = 0; i < g.dim; ++i)
    if (u(i) != 0) m += u(i) * lambda[i];
  return m;
}

Vector DGLA2Data::varpi_of(const Vector& a1, const Vector& a2) const {
  Vector w = Vector::Zero(dim_h);
  for (int i = 0; i < dim_a; ++i) {
    if (a1(i) == 0) continue;
    for (int j = 0; j < dim_a; ++j)
      if (a2(j) != 0) w += (a1(i) * a2(j)) * varpi[static_cast<std::size_t>(i) * dim_a + j];
  }
  return w;
}

bool DGLA2Data::exact() const {
  const int rh = dim_h ? rank(delta_ha) : 0;
  const int rg = dim_a ? rank(delta_ag) : 0;
  const bool composite = dim_h == 0 || g.dim == 0 || is_zero(Matrix(delta_ag * delta_ha));
  return rh == dim_h && rg == g.dim && composite && dim_a - rg == rh;
}

namespace {

void shapes(const DGLA2Data& d) {
  const int n = d.g.dim;
  require_size(d.g.c.size(), n * n * n, "dgla: structure constants");
  require_size(d.tau.size(), n, "dgla: tau");
  require_size(d.lambda.size(), n, "dgla: lambda");
  require_size(d.varpi.size(), d.dim_a * d.dim_a, "dgla: varpi");
  for (const auto& t : d.tau)
    if (t.rows() != d.dim_a || t.cols() != d.dim_a) throw InputError("dgla: tau matrix has the wrong size");
  for (const auto& l : d.lambda)
    if (l.rows() != d.dim_h || l.cols() != d.dim_h) throw InputError("dgla: lambda matrix has the wrong size");
  for (const auto& w : d.varpi)
    if (w.size() != d.dim_h) throw InputError("dgla: varpi value has the wrong size");
  if (d.delta_ha.rows() != d.dim_a || d.delta_ha.cols() != d.dim_h) throw InputError("dgla: delta h->a has the wrong size");
  if (d.delta_ag.rows() != n || d.delta_ag.cols() != d.dim_a) throw InputError("dgla: delta a->g has the wrong size");
}

void lie_checks(const LieAlgebra& g, CheckReport& r) {
  const int n = g.dim;
  r.pass("antisymmetry");
  r.pass("jacobi");
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (g(k, i, j) != -g(k, j, i)) r.fail("antisymmetry", "c" + idx({k, i, j}));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vector a = unit(n, i), b = unit(n, j), c = unit(n, k);
        const Vector s = g.bracket(a, g.bracket(b, c)) + g.bracket(b, g.bracket(c, a)) + g.bracket(c, g.bracket(a, b));
        if (!is_zero(s)) r.fail("jacobi", "basis triple " + idx({i, j, k}) + " gives " + vec_str(s));
      }
}

void representation_check(const LieAlgebra& g, const std::vector<Matrix>& rep, const std::string& name, CheckReport& r) {
  r.pass(name);
  for (int i = 0; i < g.dim; ++i)
    for (int j = 0; j < g.dim; ++j) {
      const Vector br = g.bracket(unit(g.dim, i), unit(g.dim, j));
      Matrix lhs = Matrix::Zero(rep[i].rows(), rep[i].cols());
      for (int k = 0; k < g.dim; ++k)
        if (br(k) != 0) lhs += br(k) * rep[k];
      if (!equal(lhs, Matrix(rep[i] * rep[j] - rep[j] * rep[i]))) r.fail(name, "basis pair " + idx({i, j}));
    }
}

}  // namespace

CheckReport validate_gla(const DGLA2Data& d) {
  shapes(d);
  CheckReport r;
  lie_checks(d.g, r);
  representation_check(d.g, d.tau, "tau representation", r);
  representation_check(d.g, d.lambda, "lambda representation", r);
  r.pass("varpi symmetric");
  r.pass("varpi equivariant");
  for (int i = 0; i < d.dim_a; ++i)
    for (int j = 0; j < d.dim_a; ++j) {
      const Vector ai = unit(d.dim_a, i), aj = unit(d.dim_a, j);
      if (!equal(d.varpi_of(ai, aj), d.varpi_of(aj, ai))) r.fail("varpi symmetric", "basis pair " + idx({i, j}));
      for (int k = 0; k < d.g.dim; ++k) {
        const Vector lhs = d.lambda[k] * d.varpi_of(ai, aj);
        const Vector rhs = d.varpi_of(d.tau[k] * ai, aj) + d.varpi_of(ai, d.tau[k] * aj);
        if (!equal(lhs, rhs)) r.fail("varpi equivariant", "u" + std::to_string(k + 1) + " on basis pair " + idx({i, j}));
      }
    }
  return r;
}

CheckReport validate_dgla(const DGLA2Data& d) {
  CheckReport r = validate_gla(d);
  const std::vector<Matrix> ad = d.g.adjoint();
  r.pass("delta squared");
  if (d.dim_h && d.g.dim && !is_zero(Matrix(d.delta_ag * d.delta_ha))) r.fail("delta squared", "delta delta != 0");
  r.pass("delta equivariant");
  for (int k = 0; k < d.g.dim; ++k) {
    if (!equal(Matrix(d.delta_ag * d.tau[k]), Matrix(ad[k] * d.delta_ag)))
      r.fail("delta equivariant", "a -> g fails for u" + std::to_string(k + 1));
    if (!equal(Matrix(d.delta_ha * d.lambda[k]), Matrix(d.tau[k] * d.delta_ha)))
      r.fail("delta equivariant", "h -> a fails for u" + std::to_string(k + 1));
  }
  r.pass("delta varpi");
  r.pass("delta on h");
  for (int i = 0; i < d.dim_a; ++i) {
    const Vector ai = unit(d.dim_a, i);
    const Vector di = d.delta_ag * ai;
    for (int j = 0; j < d.dim_a; ++j) {
      const Vector aj = unit(d.dim_a, j);
      const Vector lhs = d.delta_ha * d.varpi_of(ai, aj);
      const Vector rhs = d.tau_of(di) * aj + d.tau_of(Vector(d.delta_ag * aj)) * ai;
      if (!equal(lhs, rhs)) r.fail("delta varpi", "basis pair " + idx({i, j}));
    }
    for (int l = 0; l < d.dim_h; ++l) {
      const Vector h = unit(d.dim_h, l);
      if (!equal(Vector(d.lambda_of(di) * h), d.varpi_of(ai, Vector(d.delta_ha * h))))
        r.fail("delta on h", "a" + std::to_string(i + 1) + ", h" + std::to_string(l + 1));
    }
  }
  return r;
}

Vector CourantAlgebraData::bracket_of(const Vector& a1, const Vector& a2) const {
  Vector w = Vector::Zero(dim_a);
  for (int i = 0; i < dim_a; ++i) {
    if (a1(i) == 0) continue;
    for (int j = 0; j < dim_a; ++j)
      if (a2(j) != 0) w += (a1(i) * a2(j)) * bracket[static_cast<std::size_t>(i) * dim_a + j];
  }
  return w;
}

CheckReport validate_courant_algebra(const CourantAlgebraData& c, bool require_exact) {
  require_size(c.bracket.size(), c.dim_a * c.dim_a, "courant algebra: bracket");
  if (c.p.rows() != c.g.dim || c.p.cols() != c.dim_a) throw InputError("courant algebra: p has the wrong size");
  CheckReport r;
  lie_checks(c.g, r);
  r.pass("leibniz");
  r.pass("p bracket");
  const int n = c.dim_a;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vector ai = unit(n, i), aj = unit(n, j);
      const Vector bij = c.bracket_of(ai, aj);
      if (!equal(Vector(c.p * bij), c.g.bracket(c.p * ai, c.p * aj))) r.fail("p bracket", "basis pair " + idx({i, j}));
      for (int k = 0; k < n; ++k) {
        const Vector ak = unit(n, k);
        const Vector lhs = c.bracket_of(ai, c.bracket_of(aj, ak));
        const Vector rhs = c.bracket_of(bij, ak) + c.bracket_of(aj, c.bracket_of(ai, ak));
        if (!equal(lhs, rhs)) r.fail("leibniz", "basis triple " + idx({i, j, k}));
      }
    }
  if (require_exact) {
    r.pass("p surjective");
    r.pass("left central");
    if (c.g.dim && rank(c.p) != c.g.dim) r.fail("p surjective", "rank " + std::to_string(rank(c.p)));
    const Matrix ker = c.g.dim ? nullspace(c.p) : Matrix(Matrix::Identity(n, n));
    for (Eigen::Index l = 0; l < ker.cols(); ++l)
      for (int j = 0; j < n; ++j)
        if (!is_zero(c.bracket_of(ker.col(l), unit(n, j))))
          r.fail("left central", "[[" + vec_str(ker.col(l)) + ", a" + std::to_string(j + 1) + "]] != 0");
  }
  return r;
}

CourantAlgebraData dgla_to_courant_algebra(const DGLA2Data& d) {
  shapes(d);
  if (!d.exact()) throw DomainError("dgla_to_courant_algebra: 0 -> h -> a -> g -> 0 is not exact");
  CourantAlgebraData c;
  c.g = d.g;
  c.dim_a = d.dim_a;
  c.p = d.delta_ag;
  for (int i = 0; i < d.dim_a; ++i) {
    const Matrix t = d.tau_of(Vector(d.delta_ag * unit(d.dim_a, i)));
    for (int j = 0; j < d.dim_a; ++j) c.bracket.push_back(t * unit(d.dim_a, j));
  }
  return c;
}

DGLA2Data courant_algebra_to_dgla(const CourantAlgebraData& c, const std::optional<Matrix>& embedding) {
  const CheckReport r = validate_courant_algebra(c, true);
  for (const auto& ch : r.checks)
    if (!ch.pass) throw DomainError("courant_algebra_to_dgla: " + ch.name + " fails: " + ch.witness);
  const int n = c.dim_a, ng = c.g.dim;
  const Matrix ker = ng ? nullspace(c.p) : Matrix(Matrix::Identity(n, n));
  const Matrix iota = embedding ? *embedding : ker;
  if (iota.rows() != n || iota.cols() != ker.cols() || rank(iota) != iota.cols() ||
      (ng && !is_zero(Matrix(c.p * iota))))
    throw DomainError("courant_algebra_to_dgla: embedding is not a basis of ker p");
  auto in_h = [&](const Vector& a) {
    const auto x = solve(iota, a);
    if (!x) throw InternalError("courant_algebra_to_dgla: value outside ker p");
    return Vector(x->col(0));
  };
  DGLA2Data d;
  d.g = c.g;
  d.dim_a = n;
  d.dim_h = static_cast<int>(iota.cols());
  d.delta_ha = iota;
  d.delta_ag = c.p;
  for (int i = 0; i < ng; ++i) {
    const auto lift = solve(c.p, Matrix(unit(ng, i)));
    if (!lift) throw InternalError("courant_algebra_to_dgla: p is not onto");
    const Vector u = lift->col(0);
    Matrix t(n, n);
    for (int j = 0; j < n; ++j) t.col(j) = c.bracket_of(u, unit(n, j));
    d.tau.push_back(t);
    Matrix l(d.dim_h, d.dim_h);
    for (int k = 0; k < d.dim_h; ++k) l.col(k) = in_h(c.bracket_of(u, iota.col(k)));
    d.lambda.push_back(l);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d.varpi.push_back(in_h(Vector(c.bracket_of(unit(n, i), unit(n, j)) + c.bracket_of(unit(n, j), unit(n, i)))));
  return d;
}

CourantAlgebraData hemisemidirect(const LieAlgebra& g, const std::vector<Matrix>& module) {
  require_size(module.size(), g.dim, "hemisemidirect: module");
  const int dh = g.dim ? static_cast<int>(module.front().rows()) : 0;
  for (const auto& m : module)
    if (m.rows() != dh || m.cols() != dh) throw InputError("hemisemidirect: module matrices must be square of one size");
  CheckReport r;
  representation_check(g, module, "module", r);
  if (!r.ok()) throw DomainError("hemisemidirect: module law fails on " + r.checks.front().witness);
  return [&] {
    CourantAlgebraData c;
    c.g = g;
    c.dim_a = g.dim + dh;
    c.p = Matrix::Zero(g.dim, c.dim_a);
    for (int i = 0; i < g.dim; ++i) c.p(i, i) = 1;
    for (int i = 0; i < c.dim_a; ++i)
      for (int j = 0; j < c.dim_a; ++j) {
        Vector w = Vector::Zero(c.dim_a);
        if (i < g.dim && j < g.dim) w.head(g.dim) = g.bracket(unit(g.dim, i), unit(g.dim, j));
        if (i < g.dim && j >= g.dim) w.tail(dh) = module[i].col(j - g.dim);
        c.bracket.push_back(w);
      }
    return c;
  }();
}

Matrix hemisemidirect_embedding(int dim_g, int dim_h) {
  Matrix e = Matrix::Zero(dim_g + dim_h, dim_h);
  for (int l = 0; l < dim_h; ++l) e(dim_g + l, l) = 1;
  return e;
}

void check_shapes(const HamAction& A) {
  shapes(A.dgla);
  require_size(A.phi.size(), A.dgla.g.dim, "action: phi");
  require_size(A.rho_a.size(), A.dgla.dim_a, "action: rho");
  require_size(A.mu_star.size(), A.dgla.dim_h, "action: mu");
  auto deg = [](const std::vector<GradedPoly>& v, int d, const char* what) {
    for (const auto& f : v) {
      const auto got = f.degree();
      if (!f.is_zero() && (!got || *got != d)) throw InputError(std::string(what) + " has the wrong degree: " + f.str());
    }
  };
  deg(A.phi, 2, "action: phi");
  deg(A.rho_a, 1, "action: rho");
  deg(A.mu_star, 0, "action: mu");
}

CheckReport validate_comoment(const HamAction& A) {
  check_shapes(A);
  const auto& s = A.scenario;
  const auto& b = s.bracket();
  const auto& d = A.dgla;
  const ChartPtr& ch = s.chart_ptr();
  const int ng = d.g.dim, na = d.dim_a, nh = d.dim_h;
  auto phi = [&](const Vector& u) { return combine(A.phi, u, ch); };
  auto rho = [&](const Vector& a) { return combine(A.rho_a, a, ch); };
  auto mu = [&](const Vector& h) { return combine(A.mu_star, h, ch); };
  CheckReport r;
  const std::string sym = "symbolic";
  r.pass(sym);
  for (int i = 0; i < ng; ++i) {
    const Vector ui = unit(ng, i);
    for (int j = 0; j < ng; ++j)
      if (!(poisson(b, A.phi[i], A.phi[j]) == phi(d.g.bracket(ui, unit(ng, j)))))
        r.fail(sym, "{phi(u" + std::to_string(i + 1) + "), phi(u" + std::to_string(j + 1) + ")}");
    for (int k = 0; k < na; ++k)
      if (!(poisson(b, A.phi[i], A.rho_a[k]) == rho(d.tau[i] * unit(na, k))))
        r.fail(sym, "{phi(u" + std::to_string(i + 1) + "), rho(a" + std::to_string(k + 1) + ")}");
    for (int l = 0; l < nh; ++l)
      if (!(poisson(b, A.phi[i], A.mu_star[l]) == mu(d.lambda[i] * unit(nh, l))))
        r.fail(sym, "{phi(u" + std::to_string(i + 1) + "), mu(h" + std::to_string(l + 1) + ")}");
  }
  for (int k = 0; k < na; ++k)
    for (int m = 0; m < na; ++m)
      if (!(poisson(b, A.rho_a[k], A.rho_a[m]) == mu(d.varpi_of(unit(na, k), unit(na, m)))))
        r.fail(sym, "{rho(a" + std::to_string(k + 1) + "), rho(a" + std::to_string(m + 1) + ")}");

  std::vector<Derivation> D;
  for (int i = 0; i < ng; ++i) D.emplace_back(b, A.phi[i]);
  r.pass("(a)");
  r.pass("(b)");
  r.pass("(c)");
  r.pass("(d)");
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      const Derivation Dij(b, phi(d.g.bracket(unit(ng, i), unit(ng, j))));
      for (int x = 0; x < s.chart().n_x(); ++x)
        if (!(D[i].function(D[j].on_x[x]) - D[j].function(D[i].on_x[x]) == Dij.on_x[x]))
          r.fail("(a)", "commutator of u" + std::to_string(i + 1) + ", u" + std::to_string(j + 1) + " on x" + std::to_string(x + 1));
      for (int m = 0; m < s.chart().n_e(); ++m)
        if (!(D[i].section(D[j].on_e[m]) - D[j].section(D[i].on_e[m]) == Dij.on_e[m]))
          r.fail("(a)", "commutator of u" + std::to_string(i + 1) + ", u" + std::to_string(j + 1) + " on " + s.chart().name(eg(m)));
    }
  for (int i = 0; i < ng; ++i) {
    for (int k = 0; k < na; ++k)
      if (!(rho(d.tau[i] * unit(na, k)) == D[i].section(A.rho_a[k])))
        r.fail("(b)", "u" + std::to_string(i + 1) + " on a" + std::to_string(k + 1));
    for (int l = 0; l < nh; ++l)
      if (!(mu(d.lambda[i] * unit(nh, l)) == D[i].function(A.mu_star[l])))
        r.fail("(c)", "u" + std::to_string(i + 1) + " on h" + std::to_string(l + 1));
  }
  for (int k = 0; k < na; ++k)
    for (int m = 0; m < na; ++m)
      if (!(mu(d.varpi_of(unit(na, k), unit(na, m))) == classical_pairing(b, A.rho_a[k], A.rho_a[m])))
        r.fail("(d)", "a" + std::to_string(k + 1) + ", a" + std::to_string(m + 1));
  const bool geometric = r.passed("(a)") && r.passed("(b)") && r.passed("(c)") && r.passed("(d)");
  if (geometric != r.passed(sym)) throw InternalError("validate_comoment: symbolic and geometric verdicts differ");
  return r;
}

CheckReport validate_chain(const HamAction& A) {
  check_shapes(A);
  const auto& s = A.scenario;
  const auto& b = s.bracket();
  const auto& d = A.dgla;
  const ChartPtr& ch = s.chart_ptr();
  const int ng = d.g.dim, na = d.dim_a, nh = d.dim_h;
  const int nx = s.chart().n_x(), ne = s.chart().n_e();
  auto phi = [&](const Vector& u) { return combine(A.phi, u, ch); };
  auto rho = [&](const Vector& a) { return combine(A.rho_a, a, ch); };
  CheckReport r;
  const std::string sym = "symbolic";
  r.pass(sym);
  for (int l = 0; l < nh; ++l)
    if (!(poisson(b, s.theta(), A.mu_star[l]) == rho(d.delta_ha * unit(nh, l))))
      r.fail(sym, "{Theta, mu(h" + std::to_string(l + 1) + ")}");
  for (int k = 0; k < na; ++k)
    if (!(poisson(b, s.theta(), A.rho_a[k]) == phi(d.delta_ag * unit(na, k))))
      r.fail(sym, "{Theta, rho(a" + std::to_string(k + 1) + ")}");
  for (int i = 0; i < ng; ++i) {
    const GradedPoly t = poisson(b, s.theta(), A.phi[i]);
    if (!t.is_zero()) r.fail(sym, "{Theta, phi(u" + std::to_string(i + 1) + ")} = " + t.str());
  }

  r.pass("(a)");
  r.pass("(b)");
  r.pass("(c)");
  for (int l = 0; l < nh; ++l)
    if (!(rho(d.delta_ha * unit(nh, l)) == rho_star_d(s, A.mu_star[l])))
      r.fail("(a)", "h" + std::to_string(l + 1));
  for (int k = 0; k < na; ++k) {
    const GradedPoly pd = phi(d.delta_ag * unit(na, k));
    for (int x = 0; x < nx; ++x)
      if (!(poisson(b, pd, s.gen(xg(x))) == anchor_apply(s, A.rho_a[k], s.gen(xg(x)))))
        r.fail("(b)", "a" + std::to_string(k + 1) + " on x" + std::to_string(x + 1));
    for (int m = 0; m < ne; ++m)
      if (!(poisson(b, pd, s.gen(eg(m))) == derived_bracket(s, A.rho_a[k], s.gen(eg(m)))))
        r.fail("(b)", "a" + std::to_string(k + 1) + " on " + s.chart().name(eg(m)));
  }
  for (int i = 0; i < ng; ++i) {
    const Derivation D(b, A.phi[i]);
    for (int m = 0; m < ne; ++m) {
      const GradedPoly em = s.gen(eg(m));
      for (int n = 0; n < ne; ++n) {
        const GradedPoly en = s.gen(eg(n));
        const GradedPoly lhs = D.section(derived_bracket(s, em, en));
        const GradedPoly rhs = derived_bracket(s, D.on_e[m], en) + derived_bracket(s, em, D.on_e[n]);
        if (!(lhs == rhs)) r.fail("(c)", "u" + std::to_string(i + 1) + " on " + s.chart().name(eg(m)) + ", " + s.chart().name(eg(n)));
      }
      for (int x = 0; x < nx; ++x) {
        const GradedPoly f = s.gen(xg(x));
        const GradedPoly lhs = D.function(anchor_apply(s, em, f));
        const GradedPoly rhs = anchor_apply(s, D.on_e[m], f) + anchor_apply(s, em, D.on_x[x]);
        if (!(lhs == rhs)) r.fail("(c)", "anchor of " + s.chart().name(eg(m)) + " under u" + std::to_string(i + 1));
      }
    }
  }
  const bool geometric = r.passed("(a)") && r.passed("(b)") && r.passed("(c)");
  if (geometric != r.passed(sym)) throw InternalError("validate_chain: symbolic and geometric verdicts differ");
  return r;
}

std::vector<int> zero_level_coordinates(const Chart& chart, const std::vector<GradedPoly>& mu_star) {
  const int n = chart.n_x(), k = static_cast<int>(mu_star.size());
  if (k == 0) return {};
  for (const auto& m : mu_star) {
    const auto d = m.degree();
    if (!m.is_zero() && (!d || *d != 0)) throw InputError("moment map component is not a function: " + m.str());
  }
  if (k > n) throw DomainError("moment map has more components than coordinates");
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    bool covers = true;
    for (const auto& m : mu_star) {
      for (const auto& [mono, c] : m.terms()) {
        bool hit = false;
        for (int a : pick) hit = hit || mono.x[a] > 0;
        if (!hit) covers = false;
      }
    }
    if (covers) return pick;
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  throw DomainError("zero level of the moment map is not a coordinate subspace");
}

RegularityReport regular_zero(const HamAction& A, const std::vector<std::vector<Rational>>& samples) {
  check_shapes(A);
  const auto& s = A.scenario;
  const int nx = s.chart().n_x();
  RegularityReport r;
  r.A = zero_level_coordinates(s.chart(), A.mu_star);
  std::map<Gen, GradedPoly> onN;
  for (int a : r.A) onN[xg(a)] = s.zero();
  bool constant = true;
  auto restrict = [&](const GradedPoly& f) {
    GradedPoly g = onN.empty() ? f : substitute(f, onN);
    for (const auto& [m, c] : g.terms())
      if (m.x_degree() != 0) constant = false;
    return g;
  };
  std::vector<std::vector<GradedPoly>> dmu, sym;
  for (const auto& m : A.mu_star) {
    dmu.emplace_back();
    for (int i = 0; i < nx; ++i) dmu.back().push_back(restrict(partial_derivative(m, xg(i))));
  }
  for (const auto& p : A.phi) {
    sym.emplace_back();
    for (int i = 0; i < nx; ++i) sym.back().push_back(restrict(poisson(s.bracket(), p, s.gen(xg(i)))));
  }
  for (const auto& rh : A.rho_a)
    for (const auto& c : linear_coefficients(rh)) restrict(c);
  auto eval = [&](const std::vector<std::vector<GradedPoly>>& rows, const std::vector<Rational>& pt) {
    Matrix M = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), nx);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < nx; ++j)
        if (auto v = evaluate_x(rows[i][j], pt).as_constant()) M(static_cast<Eigen::Index>(i), j) = *v;
    return M;
  };
  r.moment = r.rho_injective = r.locally_free = true;
  for (const auto& pt : samples) {
    for (int a : r.A)
      if (pt[a] != 0) throw InputError("regular_zero: sample point is not on the zero level");
    std::string at = " at (";
    for (std::size_t i = 0; i < pt.size(); ++i) at += (i ? ", " : "") + pt[i].str();
    at += ")";
    if (!dmu.empty() && rank(eval(dmu, pt)) != A.dgla.dim_h && r.moment) {
      r.moment = false;
      r.witness += "d mu drops rank" + at + "; ";
    }
    if (!A.rho_a.empty() && rank(frame_matrix(A.rho_a, pt)) != A.dgla.dim_a && r.rho_injective) {
      r.rho_injective = false;
      r.witness += "rho is not injective" + at + "; ";
    }
    if (!sym.empty() && rank(eval(sym, pt)) != A.dgla.g.dim && r.locally_free) {
      r.locally_free = false;
      r.witness += "action is not locally free" + at + "; ";
    }
  }
  r.certified = constant && r.ok();
  return r;
}

RegularityReport regular_zero(const HamAction& A, std::uint64_t seed, int random_points) {
  const auto Aset = zero_level_coordinates(A.scenario.chart(), A.mu_star);
  return regular_zero(A, sample_points(A.scenario.chart(), Aset, seed, random_points));
}

GeometricCoisoData zero_level_data(const HamAction& A) {
  check_shapes(A);
  const auto& s = A.scenario;
  const int nx = s.chart().n_x(), ng = A.dgla.g.dim;
  GeometricCoisoData d;
  d.A = zero_level_coordinates(s.chart(), A.mu_star);
  d.K = A.rho_a;
  std::map<Gen, GradedPoly> onN;
  for (int a : d.A) onN[xg(a)] = s.zero();
  Matrix S = Matrix::Zero(ng, nx);
  for (int k = 0; k < ng; ++k)
    for (int i = 0; i < nx; ++i) {
      GradedPoly v = poisson(s.bracket(), A.phi[k], s.gen(xg(i)));
      if (!onN.empty()) v = substitute(v, onN);
      const auto c = v.as_constant();
      if (!c) throw DomainError("zero_level_data: action symbol is not constant along N: " + v.str());
      S(k, i) = *c;
    }
  const auto e = rref(S);
  if (static_cast<int>(e.pivots.size()) != ng) throw DomainError("zero_level_data: action is not locally free on N");
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    for (int j = 0; j < nx; ++j)
      if (j != e.pivots[r] && e.reduced(static_cast<Eigen::Index>(r), j) != 0)
        throw DomainError("zero_level_data: F is not spanned by coordinate fields");
    d.C.push_back(e.pivots[r]);
  }
  const CoisotropicIdeal I = ideal_from_data(s.bracket_ptr(), d);
  for (int k = 0; k < ng; ++k)
    if (!I.contains(A.phi[k]))
      throw DomainError("zero_level_data: phi(u" + std::to_string(k + 1) + ") is not in the ideal of the coordinate flat frame");
  return d;
}

bool left_central_check(const CourantScenario& s, std::string* witness) {
  for (int i = 0; i < s.chart().n_x(); ++i) {
    const GradedPoly r = poisson(s.bracket(), s.theta(), s.gen(xg(i)));
    for (int m = 0; m < s.chart().n_e(); ++m) {
      const GradedPoly v = derived_bracket(s, r, s.gen(eg(m)));
      if (!v.is_zero()) {
        if (witness) *witness = "[[rho* dx" + std::to_string(i + 1) + ", " + s.chart().name(eg(m)) + "]] = " + v.str();
        return false;
      }
    }
    for (int j = 0; j < s.chart().n_x(); ++j) {
      const GradedPoly v = anchor_apply(s, r, s.gen(xg(j)));
      if (!v.is_zero()) {
        if (witness) *witness = "rho(rho* dx" + std::to_string(i + 1) + ") x" + std::to_string(j + 1) + " = " + v.str();
        return false;
      }
    }
  }
  return true;
}

HamAction from_reduction_data(const CourantScenario& s, const LieAlgebra& g, const std::vector<GradedPoly>& psi,
                              const std::vector<Matrix>& module, const std::vector<GradedPoly>& mu_star) {
  require_size(psi.size(), g.dim, "reduction data: psi");
  std::string w;
  if (!left_central_check(s, &w)) throw DomainError("reduction data: scenario is not left-central: " + w);
  for (int i = 0; i < g.dim; ++i) {
    const auto d = psi[i].degree();
    if (!psi[i].is_zero() && (!d || *d != 1)) throw InputError("reduction data: psi(u) must be a section: " + psi[i].str());
  }
  for (int i = 0; i < g.dim; ++i)
    for (int j = i; j < g.dim; ++j) {
      const GradedPoly p = pairing(s, psi[i], psi[j]);
      if (!p.is_zero())
        throw DomainError("reduction data: psi has non-isotropic image, <psi(u" + std::to_string(i + 1) + "), psi(u" +
                          std::to_string(j + 1) + ")> = " + p.str());
    }
  for (int i = 0; i < g.dim; ++i)
    for (int j = 0; j < g.dim; ++j) {
      const GradedPoly lhs = derived_bracket(s, psi[i], psi[j]);
      const GradedPoly rhs = combine(psi, g.bracket(unit(g.dim, i), unit(g.dim, j)), s.chart_ptr());
      if (!(lhs == rhs))
        throw DomainError("reduction data: psi is not bracket preserving on u" + std::to_string(i + 1) + ", u" + std::to_string(j + 1));
    }
  const CourantAlgebraData c = hemisemidirect(g, module);
  const int dh = c.dim_a - g.dim;
  require_size(mu_star.size(), dh, "reduction data: mu");
  for (int i = 0; i < g.dim; ++i)
    for (int l = 0; l < dh; ++l) {
      const GradedPoly lhs = anchor_apply(s, psi[i], mu_star[l]);
      const GradedPoly rhs = combine(mu_star, module[i] * unit(dh, l), s.chart_ptr());
      if (!(lhs == rhs))
        throw DomainError("reduction data: mu is not equivariant for u" + std::to_string(i + 1) + ", h" + std::to_string(l + 1));
    }
  HamAction A{s, courant_algebra_to_dgla(c, hemisemidirect_embedding(g.dim, dh)), {}, {}, mu_star};
  for (int i = 0; i < g.dim; ++i) A.rho_a.push_back(psi[i]);
  for (int l = 0; l < dh; ++l) A.rho_a.push_back(poisson(s.bracket(), s.theta(), mu_star[l]));
  for (int i = 0; i < g.dim; ++i) A.phi.push_back(poisson(s.bracket(), s.theta(), psi[i]));
  if (!validate_comoment(A).ok() || !validate_chain(A).ok())
    throw InternalError("from_reduction_data: assembled action fails its own checks");
  return A;
}

bool is_exact_scenario(const CourantScenario& s) {
  const int n = s.chart().n_x();
  if (s.chart().n_e() != 2 * n || !equal(s.bracket().metric(), hyperbolic_metric(n))) return false;
  GradedPoly rest = s.theta();
  for (int i = 0; i < n; ++i) rest -= s.gen(v_gen(i)) * s.gen(pg(i));
  const std::uint64_t v_mask = n ? (std::uint64_t{1} << n) - 1 : 0;
  for (const auto& [m, c] : rest.terms())
    if (m.odd_count() != 3 || (m.e & ~v_mask) != 0) return false;
  return true;
}

ExtendedActionReport extended_action_check(const CourantScenario& s, const CourantAlgebraData& c,
                                           const std::vector<GradedPoly>& Psi, const std::vector<GradedPoly>& mu_star,
                                           std::uint64_t seed) {
  if (!is_exact_scenario(s)) throw DomainError("extended_action_check: scenario is not exact");
  require_size(Psi.size(), c.dim_a, "extended action: Psi");
  const CheckReport cr = validate_courant_algebra(c, true);
  ExtendedActionReport rep;
  rep.checks = cr;
  const int n = c.dim_a;
  const Matrix iota = c.g.dim ? nullspace(c.p) : Matrix(Matrix::Identity(n, n));
  require_size(mu_star.size(), static_cast<int>(iota.cols()), "extended action: mu");
  const ChartPtr& ch = s.chart_ptr();
  rep.checks.pass("bracket preserving");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(derived_bracket(s, Psi[i], Psi[j]) == combine(Psi, c.bracket_of(unit(n, i), unit(n, j)), ch)))
        rep.checks.fail("bracket preserving", "a" + std::to_string(i + 1) + ", a" + std::to_string(j + 1));
  rep.checks.pass("closed on h");
  for (Eigen::Index l = 0; l < iota.cols(); ++l)
    if (!(combine(Psi, iota.col(l), ch) == poisson(s.bracket(), s.theta(), mu_star[l])))
      rep.checks.fail("closed on h", "Psi(h" + std::to_string(l + 1) + ") != rho* d mu(h" + std::to_string(l + 1) + ")");
  rep.extracond = true;
  for (int i = 0; i < n && rep.extracond; ++i)
    for (int j = i; j < n; ++j) {
      const Vector sym = c.bracket_of(unit(n, i), unit(n, j)) + c.bracket_of(unit(n, j), unit(n, i));
      const auto h = solve(iota, sym);
      if (!h) throw DomainError("extended action: symmetric bracket leaves ker p");
      if (!(combine(mu_star, Vector(h->col(0)), ch) == pairing(s, Psi[i], Psi[j]))) {
        rep.extracond = false;
        rep.checks.fail("extracond", "a" + std::to_string(i + 1) + ", a" + std::to_string(j + 1));
        break;
      }
    }
  if (rep.extracond) rep.checks.pass("extracond");
  const auto A = zero_level_coordinates(s.chart(), mu_star);
  rep.isotropic = true;
  for (const auto& pt : sample_points(s.chart(), A, seed))
    for (int i = 0; i < n && rep.isotropic; ++i)
      for (int j = i; j < n; ++j)
        if (!evaluate_x(pairing(s, Psi[i], Psi[j]), pt).is_zero()) {
          rep.isotropic = false;
          break;
        }
  if (rep.isotropic)
    rep.checks.pass("K isotropic on zero level");
  else
    rep.checks.fail("K isotropic on zero level", "Gram matrix of Psi(a) is nonzero at a sample");
  return rep;
}

HamReduction ham_reduce(const HamAction& A, const HamReduceOptions& options) {
  const auto& s = A.scenario;
  auto require = [](const CheckReport& r, const char* what) {
    for (const auto& c : r.checks)
      if (!c.pass) throw DomainError(std::string("ham_reduce: ") + what + " check " + c.name + " fails: " + c.witness);
  };
  require(validate_comoment(A), "comoment");
  require(validate_chain(A), "chain");
  const RegularityReport reg = regular_zero(A, options.seed, options.random_points);
  if (!reg.ok()) throw DomainError("ham_reduce: zero is not a regular value: " + reg.witness);
  GeometricCoisoData d = zero_level_data(A);
  Reduction red = reduce(s, d);
  const CoisotropicIdeal& I = red.ideal();
  const auto samples = sample_points(s.chart(), d.A, options.seed, options.random_points);

  std::vector<int> tn;
  for (int i = 0; i < s.chart().n_x(); ++i)
    if (!member(d.A, i)) tn.push_back(i);
  const auto flat = flat_frame(s.bracket_ptr(), d);
  std::vector<GradedPoly> kperp(I.k_generators().begin(), I.k_generators().end());
  kperp.insert(kperp.end(), flat.begin(), flat.end());
  ExactnessResult ex{true, true};
  const Eigen::Index dimN = static_cast<Eigen::Index>(tn.size());
  Matrix F = Matrix::Zero(dimN, static_cast<Eigen::Index>(d.C.size()));
  for (std::size_t k = 0; k < d.C.size(); ++k)
    F(std::find(tn.begin(), tn.end(), d.C[k]) - tn.begin(), static_cast<Eigen::Index>(k)) = 1;
  auto anchors = [&](const std::vector<GradedPoly>& frame, const std::vector<Rational>& pt) {
    Matrix M = Matrix::Zero(dimN, static_cast<Eigen::Index>(frame.size()));
    for (std::size_t k = 0; k < frame.size(); ++k)
      for (std::size_t j = 0; j < tn.size(); ++j)
        if (auto v = evaluate_x(anchor_apply(s, frame[k], s.gen(xg(tn[j]))), pt).as_constant())
          M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = *v;
    return RationalSubspace::span(M);
  };
  for (const auto& pt : samples) {
    const ExactnessResult e =
        exactness_conditions(dimN, RationalSubspace(F), anchors(I.k_generators(), pt), anchors(kperp, pt));
    ex.rank_condition = ex.rank_condition && e.rank_condition;
    ex.intersection_condition = ex.intersection_condition && e.intersection_condition;
  }
  HamReduction out{d, red, ex, std::nullopt, std::nullopt};

  if (options.J) {
    for (std::size_t k = 0; k < A.phi.size(); ++k)
      if (!I.contains(poisson(s.bracket(), A.phi[k], *options.J)))
        throw DomainError("ham_reduce: J is not invariant under u" + std::to_string(k + 1));
    out.J = reduce_quadratic(s, *options.J, d, red);
  }
  if (options.L) {
    const auto& L = *options.L;
    for (std::size_t k = 0; k < A.phi.size(); ++k)
      for (const auto& l : L) {
        const GradedPoly moved = poisson(s.bracket(), A.phi[k], l);
        for (const auto& l2 : L)
          if (!I.contains(pairing(s, moved, l2)))
            throw DomainError("ham_reduce: L is not invariant under u" + std::to_string(k + 1));
      }
    out.L = reduce_dirac(L, s, d, red, samples);
  }
  return out;
}

}  // namespace grc
