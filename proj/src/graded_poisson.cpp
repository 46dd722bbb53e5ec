#include "grc/graded_poisson.hpp"

#include "grc/exact_linalg.hpp"

#include <bit>

namespace grc {

BracketData::BracketData(ChartPtr chart, Matrix metric) : chart_(std::move(chart)), metric_(std::move(metric)) {
  if (chart_->n_x() != chart_->n_p()) throw InputError("bracket data: need as many p generators as x generators");
  if (metric_.rows() != chart_->n_e() || metric_.cols() != chart_->n_e())
    throw InputError("bracket data: metric must be n_e x n_e");
  if (!equal(metric_, metric_.transpose())) throw InputError("bracket data: metric is not symmetric");
  auto inv = inverse(metric_);
  if (!inv) throw InputError("bracket data: metric is degenerate");
  metric_inverse_ = *inv;
}

GradedPoly BracketData::pairing(int mu, int nu) const { return GradedPoly::constant(chart_, metric_(mu, nu)); }

namespace {

struct Term {
  Monomial m;
  Rational c;
};

// Left/right derivative of a single monomial; returns false when it vanishes.
bool mono_derivative(const Monomial& m, Gen g, bool right, Monomial& out, int& sign, int& mult) {
  out = m;
  sign = 1;
  mult = 1;
  switch (g.kind) {
    case GenKind::X:
      if (!m.x[g.index]) return false;
      mult = m.x[g.index];
      --out.x[g.index];
      return true;
    case GenKind::P:
      if (!m.p[g.index]) return false;
      mult = m.p[g.index];
      --out.p[g.index];
      return true;
    case GenKind::E: {
      const std::uint64_t bit = std::uint64_t{1} << g.index;
      if (!(m.e & bit)) return false;
      const int passed = right ? std::popcount(m.e & ~((bit << 1) - 1)) : std::popcount(m.e & (bit - 1));
      sign = (passed & 1) ? -1 : 1;
      out.e &= ~bit;
      return true;
    }
  }
  return false;
}

void accumulate_product(GradedPoly& out, const Monomial& a, const Monomial& b, const Rational& c) {
  const int s = odd_product_sign(a.e, b.e);
  if (s == 0) return;
  Monomial m;
  m.e = a.e | b.e;
  m.x.resize(a.x.size());
  for (std::size_t i = 0; i < m.x.size(); ++i) m.x[i] = a.x[i] + b.x[i];
  m.p.resize(a.p.size());
  for (std::size_t i = 0; i < m.p.size(); ++i) m.p[i] = a.p[i] + b.p[i];
  out.add_term(m, s > 0 ? c : Rational(-c));
}

}  // namespace

// {f,g} = sum_i (d_{p_i} f)(d_{x^i} g) - (d_{x^i} f)(d_{p_i} g) + g^{mu nu} (f d<-_{e^mu}) (d->_{e^nu} g)
GradedPoly poisson(const BracketData& b, const GradedPoly& f, const GradedPoly& g) {
  require_same_chart(f, g);
  if (!(f.chart() == b.chart())) throw InputError("poisson: chart mismatch");
  const Chart& ch = b.chart();
  const Matrix& G = b.metric();
  GradedPoly out(f.chart_ptr());
  Monomial da, db;
  int sa, sb, ma, mb;
  for (const auto& [mf, cf] : f.terms()) {
    for (const auto& [mg, cg] : g.terms()) {
      for (int i = 0; i < ch.n_x(); ++i) {
        if (mono_derivative(mf, pg(i), false, da, sa, ma) && mono_derivative(mg, xg(i), false, db, sb, mb))
          accumulate_product(out, da, db, cf * cg * (ma * mb));
        if (mono_derivative(mf, xg(i), false, da, sa, ma) && mono_derivative(mg, pg(i), false, db, sb, mb))
          accumulate_product(out, da, db, -(cf * cg * (ma * mb)));
      }
      if (!mf.e || !mg.e) continue;
      for (std::uint64_t ef = mf.e; ef; ef &= ef - 1) {
        const int mu = std::countr_zero(ef);
        mono_derivative(mf, eg(mu), true, da, sa, ma);
        for (std::uint64_t eg_ = mg.e; eg_; eg_ &= eg_ - 1) {
          const int nu = std::countr_zero(eg_);
          if (G(mu, nu) == 0) continue;
          mono_derivative(mg, eg(nu), false, db, sb, mb);
          accumulate_product(out, da, db, cf * cg * G(mu, nu) * (sa * sb));
        }
      }
    }
  }
  return out;
}

std::function<GradedPoly(const GradedPoly&)> hamiltonian_field(const BracketData& b, const GradedPoly& h) {
  if (!h.degree()) throw DomainError("hamiltonian_field: " + h.str() + " is not homogeneous");
  return [&b, h](const GradedPoly& f) { return poisson(b, h, f); };
}

bool nondegeneracy_check(const BracketData& b, const std::vector<Rational>& point) {
  if (static_cast<int>(point.size()) != b.chart().n_x()) throw InputError("nondegeneracy_check: point dimension");
  if (b.chart().n_x() != b.chart().n_p()) return false;
  // {p_i, x^j} is the identity pairing in canonical charts.
  Matrix px = Matrix::Identity(b.chart().n_p(), b.chart().n_x());
  return determinant(px) != 0 && determinant(b.metric()) != 0;
}

GradedPoly exp_adjoint(const BracketData& b, const GradedPoly& B, const GradedPoly& f) {
  const auto d = B.degree();
  if (!B.is_zero() && (!d || *d != 2)) throw DomainError("exp_adjoint: B must have degree 2");
  const int cap = 2 * (f.max_p_degree() + f.max_odd_count()) + 4;
  GradedPoly sum = f;
  GradedPoly iterate = f;
  Rational factorial(1);
  for (int k = 1;; ++k) {
    iterate = poisson(b, B, iterate);
    if (iterate.is_zero()) return sum;
    if (k > cap) throw DomainError("exp_adjoint: ad_B is not nilpotent on the input within the iteration cap");
    factorial *= k;
    sum += iterate * (Rational(1) / factorial);
  }
}

Matrix hyperbolic_metric(int n) {
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) g(i, n + i) = g(n + i, i) = 1;
  return g;
}

}  // namespace grc
