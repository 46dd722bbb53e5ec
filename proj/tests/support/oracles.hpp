#pragma once
// Independent oracles and random generators shared by the unit tests and the acceptance driver.

#include "grc/hamiltonian_reduction.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>

namespace grc::testing {

inline std::vector<Gen> factors(const Monomial& m) {
  std::vector<Gen> out;
  for (std::size_t i = 0; i < m.x.size(); ++i)
    for (int k = 0; k < m.x[i]; ++k) out.push_back(xg(static_cast<int>(i)));
  for (int mu = 0; mu < 64; ++mu)
    if (m.e >> mu & 1) out.push_back(eg(mu));
  for (std::size_t i = 0; i < m.p.size(); ++i)
    for (int k = 0; k < m.p[i]; ++k) out.push_back(pg(static_cast<int>(i)));
  return out;
}

inline GradedPoly product(const ChartPtr& c, const std::vector<Gen>& f, std::size_t from) {
  GradedPoly r = GradedPoly::constant(c, Rational(1));
  for (std::size_t i = from; i < f.size(); ++i) r = r * GradedPoly::generator(c, f[i]);
  return r;
}

inline int sign(int a, int b) { return (a * b) % 2 ? -1 : 1; }

inline GradedPoly generator_bracket(const BracketData& b, Gen a, Gen c) {
  const ChartPtr& ch = b.chart_ptr();
  if (a.kind == GenKind::P && c.kind == GenKind::X && a.index == c.index) return GradedPoly::constant(ch, Rational(1));
  if (a.kind == GenKind::X && c.kind == GenKind::P && a.index == c.index) return GradedPoly::constant(ch, Rational(-1));
  if (a.kind == GenKind::E && c.kind == GenKind::E) return GradedPoly::constant(ch, b.metric()(a.index, c.index));
  return GradedPoly(ch);
}

// {a1 a2 ... ak, g} = a1 {a2...ak, g} + (-1)^{|a2...ak||g|} {a1, g} a2...ak, then the
// mirror rule on the right argument, down to generator pairs.
inline GradedPoly leibniz_gen_right(const BracketData& b, const std::vector<Gen>& f, std::size_t from, Gen g) {
  const ChartPtr& ch = b.chart_ptr();
  if (from >= f.size()) return GradedPoly(ch);
  if (from + 1 == f.size()) return generator_bracket(b, f[from], g);
  int rest_deg = 0;
  for (std::size_t i = from + 1; i < f.size(); ++i) rest_deg += f[i].degree();
  const GradedPoly a = GradedPoly::generator(ch, f[from]);
  GradedPoly out = a * leibniz_gen_right(b, f, from + 1, g);
  out += Rational(sign(rest_deg, g.degree())) * (generator_bracket(b, f[from], g) * product(ch, f, from + 1));
  return out;
}

inline GradedPoly leibniz_bracket(const BracketData& b, const GradedPoly& F, const GradedPoly& G) {
  const ChartPtr& ch = b.chart_ptr();
  GradedPoly out(ch);
  for (const auto& [mf, cf] : F.terms()) {
    const auto fa = factors(mf);
    const int df = mf.degree();
    for (const auto& [mg, cg] : G.terms()) {
      const auto gb = factors(mg);
      // {f, g1 g2...} = {f, g1} g2... + (-1)^{|f||g1|} g1 {f, g2...}
      GradedPoly acc(ch);
      GradedPoly left = GradedPoly::constant(ch, Rational(1));
      int passed = 0;
      for (std::size_t j = 0; j < gb.size(); ++j) {
        const GradedPoly term = leibniz_gen_right(b, fa, 0, gb[j]) * product(ch, gb, j + 1);
        acc += Rational(sign(df, passed)) * (left * term);
        left = left * GradedPoly::generator(ch, gb[j]);
        passed += gb[j].degree();
      }
      out += (cf * cg) * acc;
    }
  }
  return out;
}

// Dorfman bracket on TM + T*M: ([X,Y], L_X beta - i_Y d alpha); xi_i <-> d/dx^i, v^i <-> dx^i.
struct Split {
  std::vector<GradedPoly> X, alpha;
};

inline Split split(const GradedPoly& e, int n) {
  const auto c = linear_coefficients(e);
  Split s;
  for (int i = 0; i < n; ++i) {
    s.alpha.push_back(c[i]);
    s.X.push_back(c[n + i]);
  }
  return s;
}

inline GradedPoly d(const GradedPoly& f, int i) { return partial_derivative(f, xg(i)); }

inline GradedPoly cartan_bracket(const ChartPtr& chart, int n, const GradedPoly& e1, const GradedPoly& e2) {
  const Split a = split(e1, n), b = split(e2, n);
  std::vector<GradedPoly> c(2 * n, GradedPoly(chart));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      c[n + j] += a.X[i] * d(b.X[j], i) - b.X[i] * d(a.X[j], i);
      c[j] += a.X[i] * d(b.alpha[j], i) + b.alpha[i] * d(a.X[i], j);
      c[j] -= b.X[i] * (d(a.alpha[j], i) - d(a.alpha[i], j));
    }
  return from_linear_coefficients(chart, c);
}

inline GradedPoly cartan_anchor(int n, const GradedPoly& e, const GradedPoly& f) {
  const Split a = split(e, n);
  GradedPoly out(f.chart_ptr());
  for (int i = 0; i < n; ++i) out += a.X[i] * d(f, i);
  return out;
}

// Lie algebra axioms straight from the structure constants.
inline bool direct_jacobi(int n, const std::vector<Rational>& c) {
  auto C = [&](int k, int i, int j) -> const Rational& { return c[(static_cast<std::size_t>(k) * n + i) * n + j]; };
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (C(k, i, j) != -C(k, j, i)) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Rational s = 0;
          for (int m = 0; m < n; ++m) s += C(m, j, k) * C(l, i, m) + C(m, k, i) * C(l, j, m) + C(m, i, j) * C(l, k, m);
          if (s != 0) return false;
        }
  return true;
}

inline Rational small(std::mt19937_64& rng, int lo = -3, int hi = 3) {
  return Rational(std::uniform_int_distribution<int>(lo, hi)(rng));
}

inline Matrix random_matrix(std::mt19937_64& rng, int r, int c, int lo = -3, int hi = 3) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = small(rng, lo, hi);
  return m;
}

// Unit lower times unit upper triangular: always invertible, small entries.
inline Matrix random_invertible(std::mt19937_64& rng, int n) {
  Matrix L = Matrix::Identity(n, n), U = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      L(i, j) = small(rng, -2, 2);
      U(j, i) = small(rng, -2, 2);
    }
  return L * U;
}

inline Vector unit_vector(int n, int i) {
  Vector v = Vector::Zero(n);
  v(i) = 1;
  return v;
}

/// Random exact Courant algebra: a hemisemidirect product seen in random bases of g and a.
inline CourantAlgebraData random_exact_courant_algebra(std::mt19937_64& rng, int max_dim_a) {
  const int pick = std::uniform_int_distribution<int>(0, 5)(rng);
  LieAlgebra g;
  std::vector<Matrix> module;
  auto room = [&](int dg) { return std::max(0, std::min(max_dim_a - dg, 3)); };
  if (pick <= 1) {
    const int dg = std::uniform_int_distribution<int>(0, std::min(2, max_dim_a))(rng);
    g = LieAlgebra::abelian(dg);
    const int dh = std::uniform_int_distribution<int>(0, room(dg))(rng);
    const Matrix X = random_matrix(rng, dh, dh);
    for (int i = 0; i < dg; ++i) module.push_back(small(rng) * X + small(rng) * Matrix(Matrix::Identity(dh, dh)));
  } else if (pick == 2) {
    g = LieAlgebra::so3();
    const bool adjoint = max_dim_a >= 6 && std::uniform_int_distribution<int>(0, 1)(rng);
    const int trivial = std::uniform_int_distribution<int>(0, std::max(0, std::min(1, max_dim_a - 3 - (adjoint ? 3 : 0))))(rng);
    const int dh = (adjoint ? 3 : 0) + trivial;
    const Matrix S = random_invertible(rng, dh), Si = *inverse(S);
    const auto ad = g.adjoint();
    for (int i = 0; i < 3; ++i) {
      Matrix m = Matrix::Zero(dh, dh);
      if (adjoint) m.block(0, 0, 3, 3) = ad[i];
      module.push_back(Si * m * S);
    }
  } else if (pick == 3) {
    g = LieAlgebra::heisenberg();
    const int dh = std::uniform_int_distribution<int>(0, room(3))(rng);
    const Matrix X = random_matrix(rng, dh, dh);
    module = {small(rng) * X, small(rng) * X, Matrix(Matrix::Zero(dh, dh))};
  } else {
    g = LieAlgebra::aff1();
    const bool two = room(2) >= 2 && std::uniform_int_distribution<int>(0, 1)(rng);
    if (two) {
      Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
      a(0, 0) = 1;
      b(0, 1) = small(rng, 1, 3);
      const Matrix S = random_invertible(rng, 2), Si = *inverse(S);
      module = {Si * a * S, Si * b * S};
    } else {
      const int dh = std::uniform_int_distribution<int>(0, room(2))(rng);
      module = {random_matrix(rng, dh, dh), Matrix(Matrix::Zero(dh, dh))};
    }
  }
  // new basis of g: columns of U
  const int dg = g.dim;
  const Matrix U = random_invertible(rng, dg), Ui = *inverse(U);
  LieAlgebra g2(dg);
  for (int i = 0; i < dg; ++i)
    for (int j = 0; j < dg; ++j) {
      const Vector w = Ui * g.bracket(U.col(i), U.col(j));
      for (int k = 0; k < dg; ++k) g2(k, i, j) = w(k);
    }
  std::vector<Matrix> module2;
  for (int i = 0; i < dg; ++i) {
    Matrix m = Matrix::Zero(module.empty() ? 0 : module[0].rows(), module.empty() ? 0 : module[0].cols());
    for (int k = 0; k < dg; ++k) m += U(k, i) * module[k];
    module2.push_back(m);
  }
  const CourantAlgebraData base = hemisemidirect(g2, module2);
  const int n = base.dim_a;
  const Matrix T = random_invertible(rng, n), Ti = *inverse(T);
  CourantAlgebraData c;
  c.g = g2;
  c.dim_a = n;
  c.p = base.p * T;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.bracket.push_back(Ti * base.bracket_of(T.col(i), T.col(j)));
  return c;
}

inline bool same_courant_algebra(const CourantAlgebraData& a, const CourantAlgebraData& b) {
  if (a.dim_a != b.dim_a || a.g.c != b.g.c || !equal(a.p, b.p)) return false;
  for (std::size_t i = 0; i < a.bracket.size(); ++i)
    if (!equal(a.bracket[i], b.bracket[i])) return false;
  return true;
}

inline bool same_dgla(const DGLA2Data& a, const DGLA2Data& b) {
  if (a.dim_a != b.dim_a || a.dim_h != b.dim_h || a.g.c != b.g.c) return false;
  for (std::size_t i = 0; i < a.tau.size(); ++i)
    if (!equal(a.tau[i], b.tau[i]) || !equal(a.lambda[i], b.lambda[i])) return false;
  for (std::size_t i = 0; i < a.varpi.size(); ++i)
    if (!equal(a.varpi[i], b.varpi[i])) return false;
  return equal(a.delta_ha, b.delta_ha) && equal(a.delta_ag, b.delta_ag);
}

// Random split-signature space (R^{2m} hyperbolic in a random basis, plus optional definite part).
inline Matrix random_split_form(std::mt19937_64& rng, int m, int extra_pos, int extra_neg) {
  const int n = 2 * m + extra_pos + extra_neg;
  Matrix G = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i) G(i, m + i) = G(m + i, i) = 1;
  for (int i = 0; i < extra_pos; ++i) G(2 * m + i, 2 * m + i) = 1;
  for (int i = 0; i < extra_neg; ++i) G(2 * m + extra_pos + i, 2 * m + extra_pos + i) = -1;
  const Matrix S = random_invertible(rng, n);
  return S.transpose() * G * S;
}


using Space = QuadraticSpace<Rational>;
using Sub = Subspace<Rational>;

// One random instance of the split-signature identities; returns the first broken one, or empty.
inline std::string linear_algebra_instance(std::mt19937_64& rng) {
  const int m = std::uniform_int_distribution<int>(1, 5)(rng);
  const int extra = std::uniform_int_distribution<int>(0, std::max(0, std::min(2, 10 - 2 * m)))(rng);
  const bool with_L = extra == 0;
  const int n = 2 * m + extra;
  Matrix G0 = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i) G0(i, m + i) = G0(m + i, i) = 1;
  for (int i = 0; i < extra; ++i) G0(2 * m + i, 2 * m + i) = i % 2 ? -1 : 1;
  const Matrix S = random_invertible(rng, n), Si = *inverse(S);
  const Space V(Matrix(S.transpose() * G0 * S));
  // isotropic K: random vectors in the span of the first block, moved to the new basis
  const int k = std::uniform_int_distribution<int>(0, m)(rng);
  Matrix k0 = Matrix::Zero(n, k);
  const Matrix mix = random_invertible(rng, m);
  for (int j = 0; j < k; ++j) k0.block(0, j, m, 1) = mix.col(j);
  const Sub K(Matrix(Si * k0));
  if (!is_isotropic(V, K)) return "generator: K not isotropic";
  const Sub perp = orthogonal(V, K);
  if (perp.dim() != n - k) return "dim K^perp";
  const auto q = quotient_space(V, K);
  if (q.space.dim() != n - 2 * k || (q.space.dim() > 0 && determinant(q.space.form()) == 0)) return "quotient form";
  std::optional<Sub> L;
  if (with_L) {
    Matrix l0 = Matrix::Zero(n, m);
    if (std::uniform_int_distribution<int>(0, 1)(rng)) {
      Matrix B = random_matrix(rng, m, m, -2, 2);
      B = B - Matrix(B.transpose());
      l0.topRows(m) = Matrix::Identity(m, m);
      l0.bottomRows(m) = B;
    } else {
      for (int i = 0; i < m; ++i) l0(std::uniform_int_distribution<int>(0, 1)(rng) ? i : m + i, i) = 1;
    }
    L = Sub(Matrix(Si * l0));
    if (!is_lagrangian(V, *L)) return "generator: L not lagrangian";
  }
  const auto sd = split_decomposition(V, K, L);
  if (!is_isotropic(V, sd.T) || sd.T.dim() != k) return "T isotropic";
  if (k > 0 && determinant(gram(V, sd.T.basis(), K.basis())) == 0) return "T dual to K";
  if (!is_zero(gram(V, sd.R.basis(), sd.T.basis())) || !is_zero(gram(V, sd.R.basis(), K.basis()))) return "R orthogonal";
  if (sum(K, sd.R) != perp || intersect(K, sd.R).dim() != 0) return "K^perp = K + R";
  if (sd.R.dim() > 0 && determinant(gram(V, sd.R.basis(), sd.R.basis())) == 0) return "R nondegenerate";
  if (L) {
    if (intersect(*L, sd.R).dim() + intersect(*L, K).dim() + intersect(*L, sd.T).dim() != L->dim()) return "L splits";
    const Sub Lq = lagrangian_quotient(V, *L, q);
    if (!is_lagrangian(q.space, Lq)) return "L_quot lagrangian";
  }
  // lift of a random skew delta
  const int r = static_cast<int>(q.space.dim());
  Matrix W = random_matrix(rng, r, r, -2, 2);
  W = W - Matrix(W.transpose());
  const Matrix delta = *inverse(q.space.form()) * W;
  const std::optional<Matrix> A = k > 0 && std::uniform_int_distribution<int>(0, 1)(rng)
                                      ? std::optional<Matrix>(random_matrix(rng, k, k, -2, 2))
                                      : std::nullopt;
  const Matrix D = lift_derivation(V, K, delta, A);
  if (!is_zero(Matrix(D.transpose() * V.form() + V.form() * D))) return "lift skew";
  if (!contains(K.basis(), Matrix(D * K.basis()))) return "lift keeps K";
  const auto back = q.project(Matrix(D * q.section));
  if (!back || !equal(*back, delta)) return "lift round trip";
  return {};
}


struct CoisoInstance {
  std::string description;
  bool symbolic = false;
  ReducibilityReport geometric;
};

// Random canonical-chart coisotropic data; nothing when the draw is not coisotropic.
inline std::optional<CoisoInstance> random_coiso_instance(std::mt19937_64& rng) {
  auto coin = [&] { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
  const int n = std::uniform_int_distribution<int>(2, 3)(rng);
  const ChartPtr c = standard_chart(n);
  std::optional<CourantScenario> s;
  if (n == 3 && coin()) {
    GradedPoly chi = random_homogeneous(c, rng, 0, 2, 2);
    s = twisted_theta(3, three_form(c, 3, {{{0, 1, 2}, chi}}));
  } else {
    s = standard_theta(n);
  }
  GeometricCoisoData d;
  for (int i = 0; i < n; ++i)
    if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) d.A.push_back(i);
  auto in_A = [&](int i) { return std::find(d.A.begin(), d.A.end(), i) != d.A.end(); };
  for (int i = 0; i < n; ++i) {
    if (in_A(i)) {
      if (coin()) d.K.push_back(GradedPoly::generator(c, v_gen(i)));
    } else {
      if (coin()) d.K.push_back(GradedPoly::generator(c, xi_gen(n, i)));
      if (coin()) d.C.push_back(i);
    }
  }
  std::ostringstream desc;
  desc << "n=" << n << " theta=" << s->theta().str() << " A=";
  for (int a : d.A) desc << a + 1 << ' ';
  desc << "K=";
  for (const auto& k : d.K) desc << k.str() << "; ";
  desc << "C=";
  for (int i : d.C) desc << i + 1 << ' ';
  try {
    const CoisotropicIdeal I = ideal_from_data(s->bracket_ptr(), d);
    if (!is_coisotropic(I)) return std::nullopt;
    CoisoInstance out;
    out.description = desc.str();
    out.symbolic = reducible_symbolic(*s, I);
    out.geometric = reducible_geometric(*s, d, rng(), 3);
    return out;
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const InputError&) {
    return std::nullopt;
  }
}

}  // namespace grc::testing
