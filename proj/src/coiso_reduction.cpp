#include "grc/coiso_reduction.hpp"

#include "grc/exact_linalg.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace grc {

namespace {

using Coef = std::function<GradedPoly(const GradedPoly&, int)>;

struct Triangular {
  std::vector<GradedPoly> rows;  // one per pivot, in pivot order
  std::vector<int> pivots;
  bool leftover = false;
};

// Gaussian elimination over the coefficient ring, pivoting only on nonzero constants.
Triangular triangularize(std::vector<GradedPoly> rows, int n_cols, const Coef& coef,
                         const std::function<bool(int)>& allowed) {
  std::vector<int> pivot_of(rows.size(), -1);
  for (;;) {
    int pr = -1, pc = -1;
    Rational pv;
    for (std::size_t r = 0; r < rows.size() && pr < 0; ++r) {
      if (pivot_of[r] >= 0 || rows[r].is_zero()) continue;
      for (int c = 0; c < n_cols; ++c) {
        if (!allowed(c)) continue;
        const auto k = coef(rows[r], c).as_constant();
        if (k && *k != 0) {
          pr = static_cast<int>(r);
          pc = c;
          pv = *k;
          break;
        }
      }
    }
    if (pr < 0) break;
    rows[pr] *= Rational(1) / pv;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (static_cast<int>(j) == pr) continue;
      const GradedPoly cj = coef(rows[j], pc);
      if (!cj.is_zero()) rows[j] -= cj * rows[pr];
    }
    pivot_of[pr] = pc;
  }
  Triangular out;
  std::vector<std::pair<int, std::size_t>> order;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (pivot_of[r] >= 0)
      order.emplace_back(pivot_of[r], r);
    else if (!rows[r].is_zero())
      out.leftover = true;
  }
  std::sort(order.begin(), order.end());
  for (const auto& [c, r] : order) {
    out.pivots.push_back(c);
    out.rows.push_back(rows[r]);
  }
  return out;
}

std::vector<std::uint16_t> unit_p(const Chart& c, int i) {
  std::vector<std::uint16_t> p(c.n_p(), 0);
  p[i] = 1;
  return p;
}

void check_indices(const std::vector<int>& idx, int n, const char* what) {
  std::set<int> seen;
  for (int i : idx)
    if (i < 0 || i >= n || !seen.insert(i).second) throw InputError(std::string(what) + ": bad or repeated index");
}

using SlotKey = std::pair<std::size_t, Monomial>;
struct SlotLess {
  bool operator()(const SlotKey& a, const SlotKey& b) const {
    if (a.first != b.first) return a.first < b.first;
    return MonomialLess{}(a.second, b.second);
  }
};

bool member(const std::vector<int>& v, int i) { return std::find(v.begin(), v.end(), i) != v.end(); }

std::string point_str(const std::vector<Rational>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + p[i].str();
  return s + ")";
}

}  // namespace

CoisotropicIdeal::CoisotropicIdeal(BracketPtr bracket, std::vector<int> A, std::vector<GradedPoly> k_frame,
                                   std::vector<GradedPoly> p_generators)
    : bracket_(std::move(bracket)), A_(std::move(A)) {
  const ChartPtr& chart = bracket_->chart_ptr();
  check_indices(A_, chart->n_x(), "ideal: x index");
  std::sort(A_.begin(), A_.end());
  for (int a : A_) subst_[xg(a)] = GradedPoly(chart);

  for (auto& k : k_frame) {
    require_same_chart(k, GradedPoly(chart));
    const auto d = k.degree();
    if (!k.is_zero() && (!d || *d != 1)) throw InputError("ideal: K frame element is not of degree 1: " + k.str());
    k = substitute(k, subst_);
  }
  auto lin = [](const GradedPoly& f, int mu) { return linear_coefficients(f)[mu]; };
  Triangular t1 = triangularize(k_frame, chart->n_e(), lin, [](int) { return true; });
  if (t1.leftover) throw DomainError("ideal: K frame cannot be brought to triangular form with constant pivots");
  pivots_ = t1.pivots;
  for (std::size_t b = 0; b < pivots_.size(); ++b) {
    const GradedPoly e = GradedPoly::generator(chart, eg(pivots_[b]));
    subst_[eg(pivots_[b])] = e - t1.rows[b];
    k_.push_back(t1.rows[b]);
  }

  for (auto& g : p_generators) {
    require_same_chart(g, GradedPoly(chart));
    const auto d = g.degree();
    if (!g.is_zero() && (!d || *d != 2)) throw InputError("ideal: degree-2 generator has the wrong degree: " + g.str());
    g = substitute(g, subst_);
  }
  auto pco = [&chart](const GradedPoly& f, int c) { return coefficient(f, 0, unit_p(*chart, c)); };
  Triangular t2 = triangularize(p_generators, chart->n_p(), pco, [](int) { return true; });
  if (t2.leftover) throw DomainError("ideal: degree-2 generators are not of the form p_c + corrections");
  C_ = t2.pivots;
  for (std::size_t c = 0; c < C_.size(); ++c) {
    subst_[pg(C_[c])] = GradedPoly::generator(chart, pg(C_[c])) - t2.rows[c];
    P_.push_back(t2.rows[c]);
  }
}

std::vector<GradedPoly> CoisotropicIdeal::generators() const {
  std::vector<GradedPoly> out;
  for (int a : A_) out.push_back(GradedPoly::generator(chart_ptr(), xg(a)));
  out.insert(out.end(), k_.begin(), k_.end());
  out.insert(out.end(), P_.begin(), P_.end());
  return out;
}

GradedPoly CoisotropicIdeal::normal_form(const GradedPoly& f) const {
  if (subst_.empty()) return f;
  return substitute(f, subst_);
}

int CoisotropicIdeal::total_dimension() const {
  const Chart& c = bracket_->chart();
  return (c.n_x() - static_cast<int>(A_.size())) + (c.n_e() - static_cast<int>(pivots_.size())) +
         (c.n_p() - static_cast<int>(C_.size()));
}

bool is_coisotropic(const CoisotropicIdeal& I, std::string* witness) {
  const auto gens = I.generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i; j < gens.size(); ++j) {
      const GradedPoly r = I.normal_form(poisson(I.bracket(), gens[i], gens[j]));
      if (!r.is_zero()) {
        if (witness) *witness = "{" + gens[i].str() + ", " + gens[j].str() + "} = " + r.str() + " mod I";
        return false;
      }
    }
  return true;
}

bool in_normalizer(const GradedPoly& f, const CoisotropicIdeal& I, std::string* witness) {
  for (const auto& g : I.generators()) {
    const GradedPoly r = I.normal_form(poisson(I.bracket(), f, g));
    if (!r.is_zero()) {
      if (witness) *witness = "{f, " + g.str() + "} = " + r.str() + " mod I";
      return false;
    }
  }
  return true;
}

std::vector<GradedPoly> default_flat_frame(const BracketPtr& b, const GeometricCoisoData& d) {
  const CoisotropicIdeal I0(b, d.A, d.K);
  const ChartPtr& chart = b->chart_ptr();
  const int m1 = chart->n_e();
  auto pair = [&](const GradedPoly& f, int mu) {
    return I0.normal_form(poisson(*b, f, GradedPoly::generator(chart, eg(mu))));
  };
  const auto& piv = I0.pivots();
  Triangular t = triangularize(I0.k_generators(), m1, pair, [&](int mu) { return !member(piv, mu); });
  if (t.pivots.size() != piv.size())
    throw DomainError("flat frame: K has no partner generators with constant pairing on N");
  std::vector<GradedPoly> out;
  for (int mu = 0; mu < m1; ++mu) {
    if (member(piv, mu) || member(t.pivots, mu)) continue;
    GradedPoly s = GradedPoly::generator(chart, eg(mu));
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      const GradedPoly c = pair(t.rows[k], mu);
      if (!c.is_zero()) s -= c * GradedPoly::generator(chart, eg(t.pivots[k]));
    }
    out.push_back(s);
  }
  return out;
}

std::vector<GradedPoly> flat_frame(const BracketPtr& b, const GeometricCoisoData& d) {
  return d.flat ? *d.flat : default_flat_frame(b, d);
}

CoisotropicIdeal ideal_from_data(const BracketPtr& b, const GeometricCoisoData& d) {
  const ChartPtr& chart = b->chart_ptr();
  check_indices(d.C, chart->n_x(), "coisotropic data: F index");
  for (int c : d.C)
    if (member(d.A, c)) throw DomainError("coisotropic data: F direction d/dx^" + std::to_string(c + 1) + " is not tangent to N");
  const CoisotropicIdeal I0(b, d.A, d.K);
  const auto& K = I0.k_generators();
  for (std::size_t i = 0; i < K.size(); ++i)
    for (std::size_t j = i; j < K.size(); ++j) {
      const GradedPoly r = I0.normal_form(poisson(*b, K[i], K[j]));
      if (!r.is_zero()) throw DomainError("coisotropic data: K is not isotropic, <" + K[i].str() + ", " + K[j].str() + "> = " + r.str());
    }
  const auto flat = flat_frame(b, d);
  const int r = static_cast<int>(K.size());
  if (static_cast<int>(flat.size()) != chart->n_e() - 2 * r)
    throw DomainError("coisotropic data: flat frame must have rank(E) - 2 rank(K) elements");
  for (const auto& s : flat) {
    const auto deg = s.degree();
    if (!deg || *deg != 1) throw InputError("coisotropic data: flat frame element is not of degree 1: " + s.str());
    for (const auto& k : K) {
      const GradedPoly p = I0.normal_form(poisson(*b, s, k));
      if (!p.is_zero()) throw DomainError("coisotropic data: flat frame element " + s.str() + " is not orthogonal to K");
    }
  }
  // q_c from x^alpha e^mu e^nu over non-pivot odd generators and x off A
  int D = 0;
  for (const auto& f : K) D = std::max(D, f.max_x_degree());
  for (const auto& f : flat) D = std::max(D, f.max_x_degree());
  std::vector<int> free_x, free_e;
  for (int i = 0; i < chart->n_x(); ++i)
    if (!member(d.A, i)) free_x.push_back(i);
  for (int mu = 0; mu < chart->n_e(); ++mu)
    if (!member(I0.pivots(), mu)) free_e.push_back(mu);
  std::vector<Monomial> xmons{Monomial::unit(*chart)};
  for (int deg = 1; deg <= D; ++deg) {
    std::vector<Monomial> next;
    for (const auto& m : xmons) {
      if (m.x_degree() != deg - 1) continue;
      int last = -1;
      for (int i = 0; i < chart->n_x(); ++i)
        if (m.x[i]) last = i;
      for (int i : free_x) {
        if (i < last) continue;
        Monomial n = m;
        ++n.x[i];
        next.push_back(n);
      }
    }
    xmons.insert(xmons.end(), next.begin(), next.end());
  }
  std::vector<GradedPoly> basis;
  for (const auto& xm : xmons)
    for (std::size_t i = 0; i < free_e.size(); ++i)
      for (std::size_t j = i + 1; j < free_e.size(); ++j) {
        Monomial m = xm;
        m.e = (std::uint64_t{1} << free_e[i]) | (std::uint64_t{1} << free_e[j]);
        basis.push_back(GradedPoly::monomial(chart, m, Rational(1)));
      }
  std::vector<GradedPoly> targets(K.begin(), K.end());
  targets.insert(targets.end(), flat.begin(), flat.end());
  std::vector<GradedPoly> P;
  for (int c : d.C) {
    // one equation per (target, monomial) of the normal form
    std::map<SlotKey, int, SlotLess> rows;
    std::vector<std::vector<std::pair<SlotKey, Rational>>> entries(basis.size() + 1);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const GradedPoly tgt = I0.normal_form(partial_derivative(targets[t], xg(c)));
      for (const auto& [m, v] : tgt.terms()) {
        rows.emplace(std::make_pair(t, m), 0);
        entries[basis.size()].push_back({{t, m}, -v});
      }
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const GradedPoly val = I0.normal_form(poisson(*b, basis[j], targets[t]));
        for (const auto& [m, v] : val.terms()) {
          rows.emplace(std::make_pair(t, m), 0);
          entries[j].push_back({{t, m}, v});
        }
      }
    }
    int idx = 0;
    for (auto& [key, row] : rows) row = idx++;
    Matrix M = Matrix::Zero(idx, static_cast<Eigen::Index>(basis.size()));
    Matrix B = Matrix::Zero(idx, 1);
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (const auto& [key, v] : entries[j]) M(rows.at(key), static_cast<Eigen::Index>(j)) += v;
    for (const auto& [key, v] : entries[basis.size()]) B(rows.at(key), 0) += v;
    const auto sol = solve(M, B);
    if (!sol) throw DomainError("coisotropic data: the flat frame does not define a flat F-connection along d/dx^" + std::to_string(c + 1));
    GradedPoly gen = GradedPoly::generator(chart, pg(c));
    for (std::size_t j = 0; j < basis.size(); ++j)
      if ((*sol)(static_cast<Eigen::Index>(j), 0) != 0) gen += (*sol)(static_cast<Eigen::Index>(j), 0) * basis[j];
    P.push_back(gen);
  }
  CoisotropicIdeal I(b, d.A, d.K, P);
  std::string w;
  if (!is_coisotropic(I, &w)) throw DomainError("coisotropic data: resulting ideal is not coisotropic: " + w);
  return I;
}

bool reducible_symbolic(const CourantScenario& s, const CoisotropicIdeal& I, std::string* witness) {
  return in_normalizer(s.theta(), I, witness);
}

std::vector<std::vector<Rational>> sample_points(const Chart& chart, const std::vector<int>& A, std::uint64_t seed,
                                                 int random_points) {
  const int n = chart.n_x();
  std::vector<std::vector<Rational>> out;
  out.emplace_back(n, Rational(0));
  for (int i = 0; i < n; ++i) {
    if (member(A, i)) continue;
    std::vector<Rational> p(n, Rational(0));
    p[i] = 1;
    out.push_back(p);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
  for (int k = 0; k < random_points; ++k) {
    std::vector<Rational> p(n, Rational(0));
    for (int i = 0; i < n; ++i) {
      const int a = num(rng), b = den(rng);
      if (!member(A, i)) p[i] = Rational(a, b);
    }
    out.push_back(p);
  }
  return out;
}

Matrix frame_matrix(const std::vector<GradedPoly>& frame, const std::vector<Rational>& point) {
  if (frame.empty()) return Matrix(0, 0);
  const int m1 = frame.front().chart().n_e();
  Matrix M = Matrix::Zero(static_cast<Eigen::Index>(frame.size()), m1);
  for (std::size_t r = 0; r < frame.size(); ++r) {
    const auto c = linear_coefficients(evaluate_x(frame[r], point));
    for (int mu = 0; mu < m1; ++mu)
      if (auto v = c[mu].as_constant()) M(static_cast<Eigen::Index>(r), mu) = *v;
  }
  return M;
}

ReducibilityReport reducible_geometric(const CourantScenario& s, const GeometricCoisoData& d, std::uint64_t seed,
                                       int random_points) {
  const BracketPtr& b = s.bracket_ptr();
  const CoisotropicIdeal I = ideal_from_data(b, d);
  const auto flat = flat_frame(b, d);
  const auto& K = I.k_generators();
  const auto samples = sample_points(s.chart(), d.A, seed, random_points);
  std::vector<GradedPoly> frame(K.begin(), K.end());
  frame.insert(frame.end(), flat.begin(), flat.end());
  for (const auto& p : samples) {
    const Matrix M = frame_matrix(frame, p);
    if (!frame.empty() && rank(M) != static_cast<int>(frame.size()))
      throw DomainError("sampling degeneracy: K and flat frame drop rank at " + point_str(p));
  }
  ReducibilityReport rep;
  // degree-0 quantity vanishing on N: samples first, then the exact normal form
  auto on_N = [&](int k, const GradedPoly& q, const std::string& what) {
    if (!rep.r[k]) return;
    for (const auto& p : samples) {
      const GradedPoly v = evaluate_x(q, p);
      if (!v.is_zero()) {
        rep.r[k] = false;
        rep.witness[k] = what + " = " + v.str() + " at " + point_str(p);
        return;
      }
    }
    const GradedPoly r = I.normal_form(q);
    if (!r.is_zero()) {
      rep.r[k] = false;
      rep.witness[k] = what + " = " + r.str() + " on N";
    }
  };
  const int nx = s.chart().n_x();
  auto x = [&](int i) { return s.gen(xg(i)); };
  for (const auto& u : frame)
    for (int a : d.A) on_N(0, anchor_apply(s, u, x(a)), "rho(" + u.str() + ") x" + std::to_string(a + 1));
  for (const auto& k : K)
    for (int j = 0; j < nx; ++j)
      if (!member(d.C, j)) on_N(1, anchor_apply(s, k, x(j)), "rho(" + k.str() + ") x" + std::to_string(j + 1));
  for (const auto& u : frame)
    for (int j = 0; j < nx; ++j) {
      if (member(d.C, j)) continue;
      const GradedPoly f = anchor_apply(s, u, x(j));
      for (int c : d.C)
        on_N(2, partial_derivative(f, xg(c)),
             "d/dx" + std::to_string(c + 1) + " rho(" + u.str() + ") x" + std::to_string(j + 1));
    }
  std::vector<GradedPoly> G(frame);
  for (int i = 0; i < nx; ++i) {
    if (member(d.A, i) || member(d.C, i)) continue;
    for (const auto& u : flat) G.push_back(x(i) * u);
  }
  for (int a : d.A)
    for (int mu = 0; mu < s.chart().n_e(); ++mu) G.push_back(x(a) * s.gen(eg(mu)));
  for (std::size_t i = 0; i < G.size() && rep.r[3]; ++i)
    for (std::size_t j = 0; j < G.size(); ++j) {
      std::string w;
      if (!in_normalizer(derived_bracket(s, G[i], G[j]), I, &w)) {
        rep.r[3] = false;
        rep.witness[3] = "[[" + G[i].str() + ", " + G[j].str() + "]]: " + w;
        break;
      }
    }
  return rep;
}

Reduction::Reduction(CoisotropicIdeal ideal, CourantScenario reduced, std::map<Gen, Gen> survivors)
    : ideal_(std::move(ideal)), reduced_(std::move(reduced)), survivors_(std::move(survivors)) {}

GradedPoly Reduction::project(const GradedPoly& f) const {
  const GradedPoly g = ideal_.normal_form(f);
  const Chart& old = g.chart();
  const ChartPtr& chart = reduced_.chart_ptr();
  GradedPoly out(chart);
  auto target = [&](Gen gen) {
    auto it = survivors_.find(gen);
    if (it == survivors_.end())
      throw DomainError("reduction: " + f.str() + " depends on the dropped generator " + old.name(gen));
    return it->second;
  };
  for (const auto& [m, c] : g.terms()) {
    Monomial r = Monomial::unit(*chart);
    for (int i = 0; i < old.n_x(); ++i)
      if (m.x[i]) r.x[target(xg(i)).index] = m.x[i];
    for (int i = 0; i < old.n_p(); ++i)
      if (m.p[i]) r.p[target(pg(i)).index] = m.p[i];
    for (std::uint64_t e = m.e; e; e &= e - 1) r.e |= std::uint64_t{1} << target(eg(std::countr_zero(e))).index;
    out.add_term(r, c);
  }
  return out;
}

GradedPoly Reduction::project_on_slice(const GradedPoly& f) const {
  std::map<Gen, GradedPoly> slice;
  for (int c : ideal_.C()) slice[xg(c)] = GradedPoly(f.chart_ptr());
  return project(slice.empty() ? f : substitute(f, slice));
}

Reduction reduce(const CourantScenario& s, const CoisotropicIdeal& I, const std::vector<GradedPoly>& flat) {
  std::string w;
  if (!reducible_symbolic(s, I, &w)) throw DomainError("reduce: theta is not reducible: " + w);
  const Chart& old = s.chart();
  std::vector<int> odd;
  for (const auto& f : flat) {
    if (f.terms().size() != 1) throw DomainError("reduce: flat frame element " + f.str() + " is not a bare generator");
    const auto& [m, c] = *f.terms().begin();
    if (c != 1 || m.odd_count() != 1 || m.degree() != 1 || m.x_degree() != 0)
      throw DomainError("reduce: flat frame element " + f.str() + " is not a bare generator");
    const int mu = std::countr_zero(m.e);
    if (member(I.pivots(), mu)) throw DomainError("reduce: flat frame element " + f.str() + " lies in K");
    odd.push_back(mu);
  }
  std::sort(odd.begin(), odd.end());
  if (std::adjacent_find(odd.begin(), odd.end()) != odd.end()) throw DomainError("reduce: repeated flat frame element");
  std::vector<int> base;
  for (int i = 0; i < old.n_x(); ++i)
    if (!member(I.A(), i) && !member(I.C(), i)) base.push_back(i);
  std::vector<std::string> xn, en, pn;
  std::map<Gen, Gen> surv;
  for (std::size_t k = 0; k < base.size(); ++k) {
    xn.push_back(old.name(xg(base[k])));
    pn.push_back(old.name(pg(base[k])));
    surv[xg(base[k])] = xg(static_cast<int>(k));
    surv[pg(base[k])] = pg(static_cast<int>(k));
  }
  Matrix g(odd.size(), odd.size());
  for (std::size_t k = 0; k < odd.size(); ++k) {
    en.push_back(old.name(eg(odd[k])));
    surv[eg(odd[k])] = eg(static_cast<int>(k));
    for (std::size_t l = 0; l < odd.size(); ++l) g(k, l) = s.bracket().metric()(odd[k], odd[l]);
  }
  if (!odd.empty() && determinant(g) == 0) throw DomainError("reduce: reduced metric is degenerate");
  auto chart = std::make_shared<const Chart>(static_cast<int>(base.size()), static_cast<int>(odd.size()),
                                             static_cast<int>(base.size()), xn, en, pn);
  auto bracket = std::make_shared<const BracketData>(chart, g);
  Reduction red(I, CourantScenario(bracket, GradedPoly(chart), s.label() + " reduced"), surv);
  const GradedPoly theta = red.project(s.theta());
  Reduction out(I, CourantScenario(bracket, theta, s.label() + " reduced"), surv);
  if (!master_equation(out.scenario())) throw InternalError("reduce: reduced theta fails the master equation");
  return out;
}

Reduction reduce(const CourantScenario& s, const GeometricCoisoData& d) {
  return reduce(s, ideal_from_data(s.bracket_ptr(), d), flat_frame(s.bracket_ptr(), d));
}

QuadraticReduction reduce_quadratic(const CourantScenario& s, const GradedPoly& J, const GeometricCoisoData& d,
                                    const Reduction& red) {
  const GcsReport before = gcs_report(s, J, odd_frame(s.chart_ptr()));
  if (!before.ok()) throw DomainError("reduce_quadratic: J is not a generalized complex structure: " + before.witness);
  const CoisotropicIdeal& I = red.ideal();
  QuadraticReduction q;
  std::string w;
  q.normalizer = in_normalizer(J, I, &w);
  q.preserves_K = true;
  for (const auto& k : I.k_generators())
    if (!I.contains(poisson(s.bracket(), J, k))) q.preserves_K = false;
  q.preserves_flat = true;
  for (const auto& f : flat_frame(s.bracket_ptr(), d))
    if (!in_normalizer(poisson(s.bracket(), J, f), I)) q.preserves_flat = false;
  if (q.normalizer != (q.preserves_K && q.preserves_flat))
    throw InternalError("reduce_quadratic: normalizer test disagrees with J(K) in K and flatness of J");
  if (!q.normalizer) throw DomainError("reduce_quadratic: J is not reducible: " + w);
  q.J_red = red.project(J);
  q.reduced_check = gcs_report(red.scenario(), q.J_red, odd_frame(red.scenario().chart_ptr()));
  if (!q.reduced_check.ok()) throw InternalError("reduce_quadratic: reduced J fails: " + q.reduced_check.witness);
  return q;
}

bool is_lagrangian_frame(const CoisotropicIdeal& I, const std::vector<GradedPoly>& L,
                         const std::vector<std::vector<Rational>>& samples, std::string* witness) {
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t j = i; j < L.size(); ++j) {
      const GradedPoly r = I.normal_form(poisson(I.bracket(), L[i], L[j]));
      if (!r.is_zero()) {
        if (witness) *witness = "<" + L[i].str() + ", " + L[j].str() + "> = " + r.str();
        return false;
      }
    }
  const int half = I.bracket().chart().n_e() / 2;
  for (const auto& p : samples) {
    if (rank(frame_matrix(L, p)) != half || static_cast<int>(L.size()) < half) {
      if (witness) *witness = "frame rank differs from half the rank at " + point_str(p);
      return false;
    }
  }
  return true;
}

bool is_involutive(const CourantScenario& s, const std::vector<GradedPoly>& L, std::string* witness) {
  for (const auto& a : L)
    for (const auto& b : L) {
      const GradedPoly br = derived_bracket(s, a, b);
      for (const auto& c : L) {
        const GradedPoly r = pairing(s, br, c);
        if (!r.is_zero()) {
          if (witness) *witness = "<[[" + a.str() + ", " + b.str() + "]], " + c.str() + "> = " + r.str();
          return false;
        }
      }
    }
  return true;
}

std::vector<GradedPoly> meet_perp(const CoisotropicIdeal& I, const std::vector<GradedPoly>& L,
                                  const std::vector<GradedPoly>& K) {
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(K.size()), static_cast<Eigen::Index>(L.size()));
  for (std::size_t b = 0; b < K.size(); ++b)
    for (std::size_t i = 0; i < L.size(); ++i) {
      const GradedPoly v = I.normal_form(poisson(I.bracket(), L[i], K[b]));
      const auto c = v.as_constant();
      if (!c) throw DomainError("L cap K^perp: pairing of L with K is not constant along N: " + v.str());
      P(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) = *c;
    }
  const Matrix ns = K.empty() ? Matrix(Matrix::Identity(L.size(), L.size())) : nullspace(P);
  std::vector<GradedPoly> out;
  for (Eigen::Index k = 0; k < ns.cols(); ++k) {
    GradedPoly w(I.chart_ptr());
    for (std::size_t i = 0; i < L.size(); ++i)
      if (ns(static_cast<Eigen::Index>(i), k) != 0) w += ns(static_cast<Eigen::Index>(i), k) * L[i];
    out.push_back(w);
  }
  return out;
}

CleanReport clean_intersection(const std::vector<GradedPoly>& L, const GeometricCoisoData& d,
                               const CoisotropicIdeal& I, const std::vector<std::vector<Rational>>& samples) {
  CleanReport rep;
  const auto& K = I.k_generators();
  std::vector<GradedPoly> KL(K.begin(), K.end());
  KL.insert(KL.end(), L.begin(), L.end());
  for (const auto& p : samples) {
    const int rk = K.empty() ? 0 : rank(frame_matrix(K, p));
    const int rl = L.empty() ? 0 : rank(frame_matrix(L, p));
    const int rkl = KL.empty() ? 0 : rank(frame_matrix(KL, p));
    rep.ranks.push_back(rk + rl - rkl);
  }
  rep.constant_rank = std::adjacent_find(rep.ranks.begin(), rep.ranks.end(), std::not_equal_to<>()) == rep.ranks.end();
  if (!rep.constant_rank) rep.witness = "dim(K cap L) varies over the samples";
  (void)d;
  const auto W = meet_perp(I, L, K);
  std::vector<GradedPoly> span(W.begin(), W.end());
  span.insert(span.end(), K.begin(), K.end());
  rep.invariant = true;
  for (std::size_t ci = 0; ci < I.C().size() && rep.invariant; ++ci) {
    const GradedPoly& Pc = I.p_generators()[ci];
    for (const auto& w : W) {
      const GradedPoly z = poisson(I.bracket(), Pc, w);
      for (const auto& p : samples) {
        const Matrix S = span.empty() ? Matrix::Zero(1, I.bracket().chart().n_e()) : frame_matrix(span, p);
        const Matrix Z = frame_matrix({z}, p);
        if (!z.is_zero() && !contains(Matrix(S.transpose()), Matrix(Z.transpose()))) {
          rep.invariant = false;
          rep.witness = "{" + Pc.str() + ", " + w.str() + "} leaves L cap K^perp + K at " + point_str(p);
          break;
        }
      }
      if (!rep.invariant) break;
    }
  }
  return rep;
}

DiracReduction reduce_dirac(const std::vector<GradedPoly>& L, const CourantScenario& s, const GeometricCoisoData& d,
                            const Reduction& red, const std::vector<std::vector<Rational>>& samples) {
  std::string w;
  if (!is_involutive(s, L, &w)) throw DomainError("reduce_dirac: L is not involutive: " + w);
  const CoisotropicIdeal& I = red.ideal();
  const CleanReport clean = clean_intersection(L, d, I, samples);
  if (!clean.ok()) throw DomainError("reduce_dirac: intersection is not clean: " + clean.witness);
  std::vector<GradedPoly> images;
  for (const auto& v : meet_perp(I, L, I.k_generators())) {
    GradedPoly img = red.project_on_slice(v);
    if (!img.is_zero()) images.push_back(img);
  }
  const CourantScenario& rs = red.scenario();
  const auto rsamples = sample_points(rs.chart(), {}, 17, 3);
  DiracReduction out;
  if (!images.empty()) {
    const std::vector<Rational>* best = nullptr;
    int best_rank = -1;
    for (const auto& p : rsamples) {
      const int r = rank(frame_matrix(images, p));
      if (r > best_rank) {
        best_rank = r;
        best = &p;
      }
    }
    const Matrix M = frame_matrix(images, *best);
    for (int piv : rref(Matrix(M.transpose())).pivots) out.frame.push_back(images[piv]);
  }
  const int half = rs.chart().n_e() / 2;
  out.lagrangian = static_cast<int>(out.frame.size()) == half;
  for (std::size_t i = 0; i < out.frame.size() && out.lagrangian; ++i)
    for (std::size_t j = i; j < out.frame.size(); ++j)
      if (!pairing(rs, out.frame[i], out.frame[j]).is_zero()) out.lagrangian = false;
  for (const auto& p : rsamples)
    if (!out.frame.empty() && rank(frame_matrix(out.frame, p)) != half) out.lagrangian = false;
  out.involutive = is_involutive(rs, out.frame);
  if (!out.lagrangian) throw DomainError("reduce_dirac: reduced frame drops rank");
  if (!out.involutive) throw InternalError("reduce_dirac: reduced frame is not involutive");
  return out;
}

}  // namespace grc
