#include "grc/courant_core.hpp"

#include "grc/exact_linalg.hpp"

#include <bit>
#include <sstream>

namespace grc {

CourantScenario::CourantScenario(BracketPtr bracket, GradedPoly theta, std::string label)
    : bracket_(std::move(bracket)), theta_(std::move(theta)), label_(std::move(label)) {
  if (!theta_.chart_ptr()) theta_ = GradedPoly(bracket_->chart_ptr());
  require_same_chart(theta_, GradedPoly(bracket_->chart_ptr()));
  const auto d = theta_.degree();
  if (!theta_.is_zero() && (!d || *d != 3)) throw DomainError("theta must be homogeneous of degree 3: " + theta_.str());
}

namespace {

std::vector<std::string> indexed(const char* prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

void require_degree(const GradedPoly& f, int d, const char* what) {
  const auto got = f.degree();
  if (!f.is_zero() && (!got || *got != d))
    throw DomainError(std::string(what) + " must have degree " + std::to_string(d) + ": " + f.str());
}

}  // namespace

ChartPtr algebroid_chart(int m0, int rank) {
  auto odd = indexed("v", rank);
  for (auto& n : indexed("xi", rank)) odd.push_back(n);
  return std::make_shared<const Chart>(m0, 2 * rank, m0, indexed("x", m0), odd, indexed("p", m0));
}

ChartPtr standard_chart(int n) { return algebroid_chart(n, n); }

BracketPtr standard_bracket(int n) { return std::make_shared<const BracketData>(standard_chart(n), hyperbolic_metric(n)); }

GradedPoly section_function(const ChartPtr& chart, const std::vector<GradedPoly>& X, const std::vector<GradedPoly>& alpha) {
  const int n = chart->n_x();
  if (static_cast<int>(X.size()) != n || static_cast<int>(alpha.size()) != n || chart->n_e() != 2 * n)
    throw InputError("section_function: expects a standard chart and n components");
  GradedPoly out(chart);
  for (int i = 0; i < n; ++i) {
    if (!X[i].is_zero()) out += X[i] * GradedPoly::generator(chart, xi_gen(n, i));
    if (!alpha[i].is_zero()) out += alpha[i] * GradedPoly::generator(chart, v_gen(i));
  }
  return out;
}

GradedPoly master_residual(const CourantScenario& s) { return poisson(s.bracket(), s.theta(), s.theta()); }

bool master_equation(const CourantScenario& s) { return master_residual(s).is_zero(); }

GradedPoly anchor_apply(const CourantScenario& s, const GradedPoly& e, const GradedPoly& f) {
  require_degree(e, 1, "anchor_apply: section");
  require_degree(f, 0, "anchor_apply: function");
  return poisson(s.bracket(), poisson(s.bracket(), s.theta(), e), f);
}

GradedPoly derived_bracket(const CourantScenario& s, const GradedPoly& e1, const GradedPoly& e2) {
  require_degree(e1, 1, "derived_bracket: first section");
  require_degree(e2, 1, "derived_bracket: second section");
  return poisson(s.bracket(), poisson(s.bracket(), s.theta(), e1), e2);
}

GradedPoly pairing(const CourantScenario& s, const GradedPoly& e1, const GradedPoly& e2) {
  return poisson(s.bracket(), e1, e2);
}

bool AxiomReport::all() const {
  for (const auto& a : axioms)
    if (!a.pass) return false;
  return true;
}

AxiomReport verify_axioms(const CourantScenario& s, const std::vector<GradedPoly>& sections,
                          const std::vector<GradedPoly>& functions) {
  AxiomReport r;
  auto fail = [&](int k, const std::string& where, const GradedPoly& residual) {
    if (!r.axioms[k].pass) return;
    r.axioms[k].pass = false;
    r.axioms[k].witness = where + " residual " + residual.str();
  };
  auto br = [&](const GradedPoly& a, const GradedPoly& b) { return derived_bracket(s, a, b); };
  auto rho = [&](const GradedPoly& a, const GradedPoly& f) { return anchor_apply(s, a, f); };
  auto ip = [&](const GradedPoly& a, const GradedPoly& b) { return pairing(s, a, b); };
  const int nx = s.chart().n_x();

  for (const auto& e1 : sections) {
    for (const auto& e2 : sections) {
      const GradedPoly b12 = br(e1, e2);
      const std::string pair = "(" + e1.str() + ", " + e2.str() + ")";
      for (int i = 0; i < nx; ++i) {
        const GradedPoly xi = s.gen(xg(i));
        const GradedPoly lhs = rho(b12, xi);
        const GradedPoly rhs = rho(e1, rho(e2, xi)) - rho(e2, rho(e1, xi));
        if (!(lhs == rhs)) fail(3, pair + " on " + xi.str(), lhs - rhs);
      }
      const GradedPoly c5 = ip(e1, br(e2, e2)) - Rational(1, 2) * rho(e1, ip(e2, e2));
      if (!c5.is_zero()) fail(4, pair, c5);
      for (const auto& f : functions) {
        const GradedPoly c2 = br(e1, f * e2) - f * b12 - rho(e1, f) * e2;
        if (!c2.is_zero()) fail(1, pair + " with f = " + f.str(), c2);
      }
      for (const auto& e3 : sections) {
        const std::string triple = "(" + e1.str() + ", " + e2.str() + ", " + e3.str() + ")";
        const GradedPoly c1 = br(e1, br(e2, e3)) - br(b12, e3) - br(e2, br(e1, e3));
        if (!c1.is_zero()) fail(0, triple, c1);
        const GradedPoly c3 = rho(e1, ip(e2, e3)) - ip(b12, e3) - ip(e2, br(e1, e3));
        if (!c3.is_zero()) fail(2, triple, c3);
      }
    }
  }
  return r;
}

CourantScenario standard_theta(int n) {
  BracketPtr b = standard_bracket(n);
  const ChartPtr& c = b->chart_ptr();
  GradedPoly theta(c);
  for (int i = 0; i < n; ++i) theta += GradedPoly::generator(c, v_gen(i)) * GradedPoly::generator(c, pg(i));
  return CourantScenario(b, theta, "standard R^" + std::to_string(n));
}

ThreeTensor three_form(const ChartPtr& chart, int n, const std::vector<std::pair<std::array<int, 3>, GradedPoly>>& components) {
  ThreeTensor t{n, std::vector<GradedPoly>(n * n * n, GradedPoly(chart))};
  for (const auto& [idx, value] : components) {
    const auto [i, j, k] = idx;
    if (!(0 <= i && i < j && j < k && k < n)) throw InputError("three_form: components need indices i < j < k < n");
    const std::array<std::array<int, 3>, 6> perms{{{i, j, k}, {j, k, i}, {k, i, j}, {j, i, k}, {i, k, j}, {k, j, i}}};
    for (int p = 0; p < 6; ++p) {
      auto& slot = t.c[(perms[p][0] * n + perms[p][1]) * n + perms[p][2]];
      slot += p < 3 ? value : -value;
    }
  }
  return t;
}

CourantScenario twisted_theta(int n, const ThreeTensor& chi) {
  CourantScenario base = standard_theta(n);
  const ChartPtr& c = base.chart_ptr();
  if (chi.n != n || static_cast<int>(chi.c.size()) != n * n * n) throw InputError("twisted_theta: chi has the wrong size");
  GradedPoly extra(c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const GradedPoly& v = chi(i, j, k);
        require_degree(v, 0, "twisted_theta: chi component");
        if (!(v + chi(j, i, k)).is_zero() || !(v + chi(i, k, j)).is_zero() || !(v + chi(k, j, i)).is_zero())
          throw InputError("twisted_theta: chi is not totally antisymmetric");
        if (v.is_zero()) continue;
        extra += v * base.gen(v_gen(i)) * base.gen(v_gen(j)) * base.gen(v_gen(k));
      }
  return CourantScenario(base.bracket_ptr(), base.theta() + Rational(1, 6) * extra, "twisted R^" + std::to_string(n));
}

CourantScenario theta_from_lie_algebroid(int m0, int r, const std::vector<std::vector<GradedPoly>>& anchor,
                                         const std::vector<GradedPoly>& structure, std::string label) {
  ChartPtr chart = algebroid_chart(m0, r);
  auto bracket = std::make_shared<const BracketData>(chart, hyperbolic_metric(r));
  if (static_cast<int>(anchor.size()) != r) throw InputError("algebroid: anchor needs one row per basis section");
  if (static_cast<int>(structure.size()) != r * r * r) throw InputError("algebroid: structure needs rank^3 entries");
  auto g = [&](Gen x) { return GradedPoly::generator(chart, x); };
  GradedPoly theta(chart);
  for (int a = 0; a < r; ++a) {
    if (static_cast<int>(anchor[a].size()) != m0) throw InputError("algebroid: anchor row has the wrong length");
    for (int i = 0; i < m0; ++i) {
      GradedPoly rho = anchor[a][i];
      if (rho.is_zero()) continue;
      require_same_chart(rho, GradedPoly(chart));
      require_degree(rho, 0, "algebroid: anchor entry");
      theta += rho * g(eg(a)) * g(pg(i));
    }
  }
  for (int c = 0; c < r; ++c)
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        const GradedPoly& k = structure[(c * r + a) * r + b];
        const GradedPoly& kt = structure[(c * r + b) * r + a];
        if (!(k + kt).is_zero()) throw InputError("algebroid: structure functions are not antisymmetric");
        if (k.is_zero()) continue;
        require_degree(k, 0, "algebroid: structure function");
        theta -= Rational(1, 2) * k * g(eg(a)) * g(eg(b)) * g(eg(r + c));
      }
  return CourantScenario(bracket, theta, label.empty() ? "algebroid double" : label);
}

bool algebroid_jacobi(int m0, int r, const std::vector<std::vector<GradedPoly>>& anchor,
                      const std::vector<GradedPoly>& structure, std::string* witness) {
  if (static_cast<int>(anchor.size()) != r || static_cast<int>(structure.size()) != r * r * r)
    throw InputError("algebroid: data has the wrong shape");
  auto c = [&](int d, int a, int b) -> const GradedPoly& { return structure[(d * r + a) * r + b]; };
  auto fail = [&](const std::string& w) {
    if (witness) *witness = w;
    return false;
  };
  // rho(e_a) f
  auto along = [&](int a, const GradedPoly& f) {
    GradedPoly out(f.chart_ptr());
    for (int i = 0; i < m0; ++i)
      if (!anchor[a][i].is_zero()) out += anchor[a][i] * partial_derivative(f, xg(i));
    return out;
  };
  for (int d = 0; d < r; ++d)
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        if (!(c(d, a, b) + c(d, b, a)).is_zero()) return fail("c is not antisymmetric in " + std::to_string(a + 1) + ", " + std::to_string(b + 1));
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      for (int i = 0; i < m0; ++i) {
        GradedPoly lhs = along(a, anchor[b][i]) - along(b, anchor[a][i]);
        for (int d = 0; d < r; ++d) lhs -= c(d, a, b) * anchor[d][i];
        if (!lhs.is_zero())
          return fail("anchor is not a morphism on e" + std::to_string(a + 1) + ", e" + std::to_string(b + 1));
      }
  // [e_a, [e_b, e_c]] = rho_a(c^d_bc) e_d + c^d_bc c^f_ad e_f, summed cyclically
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      for (int cc = b + 1; cc < r; ++cc) {
        const int t[3][3] = {{a, b, cc}, {b, cc, a}, {cc, a, b}};
        for (int f = 0; f < r; ++f) {
          GradedPoly sum(structure.front().chart_ptr());
          for (const auto& o : t) {
            sum += along(o[0], c(f, o[1], o[2]));
            for (int d = 0; d < r; ++d) sum += c(d, o[1], o[2]) * c(f, o[0], d);
          }
          if (!sum.is_zero())
            return fail("Jacobi fails on e" + std::to_string(a + 1) + ", e" + std::to_string(b + 1) + ", e" +
                        std::to_string(cc + 1));
        }
      }
  return true;
}

bool is_standard(const CourantScenario& s) {
  const int n = s.chart().n_x();
  if (s.chart().n_e() != 2 * n || !equal(s.bracket().metric(), hyperbolic_metric(n))) return false;
  GradedPoly theta(s.chart_ptr());
  for (int i = 0; i < n; ++i) theta += s.gen(v_gen(i)) * s.gen(pg(i));
  return theta == s.theta();
}

CourantScenario bfield_on_theta(const CourantScenario& s, const GradedPoly& B) {
  const int n = s.chart().n_x();
  if (s.chart().n_e() != 2 * n || !equal(s.bracket().metric(), hyperbolic_metric(n)))
    throw DomainError("bfield_on_theta: needs a standard or twisted scenario");
  require_degree(B, 2, "bfield_on_theta: B");
  for (const auto& [m, c] : B.terms()) {
    if (m.odd_count() != 2 || (m.e >> n) != 0) throw DomainError("bfield_on_theta: B must be quadratic in the v block");
  }
  GradedPoly theta = exp_adjoint(s.bracket(), B, s.theta());
  return CourantScenario(s.bracket_ptr(), theta, s.label() + " + B");
}

GradedPoly quadratic_from_endomorphism(const BracketData& b, const Matrix& A) {
  const int n = b.chart().n_e();
  if (A.rows() != n || A.cols() != n) throw InputError("quadratic_from_endomorphism: size mismatch");
  const Matrix W = A * b.metric_inverse();
  if (!equal(W, Matrix(-W.transpose()))) throw DomainError("quadratic_from_endomorphism: endomorphism is not skew");
  GradedPoly J(b.chart_ptr());
  for (int m = 0; m < n; ++m)
    for (int l = m + 1; l < n; ++l)
      if (W(m, l) != 0)
        J += W(m, l) * GradedPoly::generator(b.chart_ptr(), eg(m)) * GradedPoly::generator(b.chart_ptr(), eg(l));
  return J;
}

std::vector<std::vector<GradedPoly>> endomorphism_of(const BracketData& b, const GradedPoly& J) {
  const int n = b.chart().n_e();
  std::vector<std::vector<GradedPoly>> A(n, std::vector<GradedPoly>(n, GradedPoly(b.chart_ptr())));
  for (int l = 0; l < n; ++l) {
    const auto col = linear_coefficients(poisson(b, J, GradedPoly::generator(b.chart_ptr(), eg(l))));
    for (int m = 0; m < n; ++m) A[m][l] = col[m];
  }
  return A;
}

Matrix gc_symplectic(const Matrix& omega) {
  const Eigen::Index n = omega.rows();
  if (omega.cols() != n || !equal(omega, Matrix(-omega.transpose()))) throw InputError("gc_symplectic: omega must be skew");
  const Matrix flat = omega.transpose();  // (i_X omega)_j = X^i omega_ij
  auto inv = inverse(flat);
  if (!inv) throw DomainError("gc_symplectic: omega is degenerate");
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  A.block(0, n, n, n) = flat;
  A.block(n, 0, n, n) = -*inv;
  return A;
}

Matrix gc_complex(const Matrix& J) {
  const Eigen::Index n = J.rows();
  if (J.cols() != n || !equal(Matrix(J * J), Matrix(-Matrix::Identity(n, n))))
    throw InputError("gc_complex: J must square to -1");
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  A.block(0, 0, n, n) = -J.transpose();
  A.block(n, n, n, n) = J;
  return A;
}

std::vector<GradedPoly> odd_frame(const ChartPtr& chart) {
  std::vector<GradedPoly> out;
  for (int m = 0; m < chart->n_e(); ++m) out.push_back(GradedPoly::generator(chart, eg(m)));
  return out;
}

GcsReport gcs_report(const CourantScenario& s, const GradedPoly& J, const std::vector<GradedPoly>& frame) {
  for (const auto& [m, c] : J.terms())
    if (m.odd_count() != 2 || m.p != std::vector<std::uint16_t>(m.p.size(), 0))
      throw DomainError("gcs_check: J is not quadratic in the odd generators");
  const BracketData& b = s.bracket();
  auto Jop = [&](const GradedPoly& e) { return poisson(b, J, e); };
  GcsReport r;
  r.square = true;
  for (const auto& e : frame) {
    const GradedPoly res = Jop(Jop(e)) + e;
    if (!res.is_zero()) {
      r.square = false;
      r.witness = "J^2 + 1 on " + e.str() + " = " + res.str();
      break;
    }
  }
  r.nijenhuis = true;
  for (std::size_t i = 0; i < frame.size() && r.nijenhuis; ++i)
    for (std::size_t j = 0; j < frame.size(); ++j) {
      const GradedPoly &a = frame[i], &c = frame[j];
      const GradedPoly Ja = Jop(a), Jc = Jop(c);
      const GradedPoly N = derived_bracket(s, Ja, Jc) - Jop(derived_bracket(s, Ja, c)) - Jop(derived_bracket(s, a, Jc)) +
                           Jop(Jop(derived_bracket(s, a, c)));
      if (!N.is_zero()) {
        r.nijenhuis = false;
        if (r.witness.empty()) r.witness = "N(" + a.str() + ", " + c.str() + ") = " + N.str();
        break;
      }
    }
  if (is_standard(s)) {
    r.cross_checked = true;
    const GradedPoly res = poisson(b, poisson(b, s.theta(), J), J) + s.theta();
    r.cross = res.is_zero();
    if (r.square && r.cross != r.nijenhuis)
      throw InternalError("gcs_check: torsion verdict disagrees with {{Theta,J},J} = -Theta");
  }
  return r;
}

bool gcs_check(const CourantScenario& s, const GradedPoly& J, const std::vector<GradedPoly>& frame) {
  return gcs_report(s, J, frame).ok();
}

GradedPoly random_homogeneous(const ChartPtr& chart, std::mt19937_64& rng, int degree, int max_x_degree, int n_terms) {
  GradedPoly out(chart);
  const int ne = chart->n_e(), np = chart->n_p(), nx = chart->n_x();
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int t = 0; t < n_terms; ++t) {
    std::vector<int> options;
    for (int k = 0; 2 * k <= degree; ++k)
      if (degree - 2 * k <= ne && (k == 0 || np > 0)) options.push_back(k);
    if (options.empty()) return out;
    const int k = options[std::uniform_int_distribution<int>(0, static_cast<int>(options.size()) - 1)(rng)];
    Monomial m = Monomial::unit(*chart);
    for (int j = 0; j < k; ++j) ++m.p[std::uniform_int_distribution<int>(0, np - 1)(rng)];
    std::vector<int> odd(ne);
    for (int j = 0; j < ne; ++j) odd[j] = j;
    std::shuffle(odd.begin(), odd.end(), rng);
    for (int j = 0; j < degree - 2 * k; ++j) m.e |= std::uint64_t{1} << odd[j];
    if (nx > 0) {
      const int xd = std::uniform_int_distribution<int>(0, max_x_degree)(rng);
      for (int j = 0; j < xd; ++j) ++m.x[std::uniform_int_distribution<int>(0, nx - 1)(rng)];
    }
    int c = coeff(rng);
    if (c == 0) c = 1;
    out.add_term(m, Rational(c));
  }
  return out;
}

}  // namespace grc
