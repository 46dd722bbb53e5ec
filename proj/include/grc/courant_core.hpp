#pragma once

#include "grc/graded_poisson.hpp"

#include <array>
#include <random>
#include <string>
#include <vector>

namespace grc {

/// A chart, canonical bracket and degree-3 function Theta. Theta = 0 is allowed.
class CourantScenario {
 public:
  CourantScenario(BracketPtr bracket, GradedPoly theta, std::string label = {});

  const BracketData& bracket() const { return *bracket_; }
  const BracketPtr& bracket_ptr() const { return bracket_; }
  const ChartPtr& chart_ptr() const { return bracket_->chart_ptr(); }
  const Chart& chart() const { return bracket_->chart(); }
  const GradedPoly& theta() const { return theta_; }
  const std::string& label() const { return label_; }

  GradedPoly gen(Gen g) const { return GradedPoly::generator(chart_ptr(), g); }
  GradedPoly zero() const { return GradedPoly(chart_ptr()); }

 private:
  BracketPtr bracket_;
  GradedPoly theta_;
  std::string label_;
};

/// Chart (x^i; v^1..v^n, xi_1..xi_n; p_i) for TM + T*M over R^n.
ChartPtr standard_chart(int n);
BracketPtr standard_bracket(int n);
/// Index of v^i and xi_i among the odd generators of a standard chart.
inline Gen v_gen(int i) { return eg(i); }
inline Gen xi_gen(int n, int i) { return eg(n + i); }

/// Sections correspond to degree-1 functions: the vector field d/dx^i to xi_i, dx^i to v^i.
GradedPoly section_function(const ChartPtr& standard, const std::vector<GradedPoly>& X,
                            const std::vector<GradedPoly>& alpha);

GradedPoly master_residual(const CourantScenario& s);
bool master_equation(const CourantScenario& s);

/// L_{rho(e)} f = {{Theta, e}, f}.
GradedPoly anchor_apply(const CourantScenario& s, const GradedPoly& e, const GradedPoly& f);
/// [[e1, e2]] = {{Theta, e1}, e2}.
GradedPoly derived_bracket(const CourantScenario& s, const GradedPoly& e1, const GradedPoly& e2);
/// <e1, e2> = {e1, e2}.
GradedPoly pairing(const CourantScenario& s, const GradedPoly& e1, const GradedPoly& e2);

struct AxiomResult {
  std::string name;
  bool pass = true;
  std::string witness;
};

struct AxiomReport {
  std::array<AxiomResult, 5> axioms{{{"C1", true, {}}, {"C2", true, {}}, {"C3", true, {}}, {"C4", true, {}}, {"C5", true, {}}}};
  bool all() const;
};

AxiomReport verify_axioms(const CourantScenario& s, const std::vector<GradedPoly>& sections,
                          const std::vector<GradedPoly>& functions);

CourantScenario standard_theta(int n);

/// Fully antisymmetric chi_{ijk}(x), stored densely at (i*n + j)*n + k.
struct ThreeTensor {
  int n = 0;
  std::vector<GradedPoly> c;
  const GradedPoly& operator()(int i, int j, int k) const { return c[(i * n + j) * n + k]; }
};

/// Builds the antisymmetric tensor from components listed with i < j < k.
ThreeTensor three_form(const ChartPtr& chart, int n, const std::vector<std::pair<std::array<int, 3>, GradedPoly>>& components);

/// Theta_chi = v^i p_i + 1/6 chi_{ijk} v^i v^j v^k.
CourantScenario twisted_theta(int n, const ThreeTensor& chi);

/// Theta = rho^i_a v^a p_i - 1/2 c^c_{ab} v^a v^b xi_c on the double A + A*.
/// anchor[a][i] = rho^i_a(x); structure[(c*r + a)*r + b] = c^c_{ab}(x).
CourantScenario theta_from_lie_algebroid(int m0, int rank, const std::vector<std::vector<GradedPoly>>& anchor,
                                         const std::vector<GradedPoly>& structure, std::string label = {});
/// Classical check: antisymmetry, Jacobi on basis triples and rho([e_a, e_b]) = [rho(e_a), rho(e_b)].
bool algebroid_jacobi(int m0, int rank, const std::vector<std::vector<GradedPoly>>& anchor,
                      const std::vector<GradedPoly>& structure, std::string* witness = nullptr);
/// Chart shared by all algebroid doubles of the given base dimension and rank.
ChartPtr algebroid_chart(int m0, int rank);

/// Theta' = exp(ad_B) Theta for B quadratic in the v block.
CourantScenario bfield_on_theta(const CourantScenario& s, const GradedPoly& B);

/// Standard chart, hyperbolic metric and Theta = v^i p_i.
bool is_standard(const CourantScenario& s);

/// Quadratic J with {J, e^l} = sum_m A(m, l) e^m; A must be skew for the metric.
GradedPoly quadratic_from_endomorphism(const BracketData& b, const Matrix& A);
/// Coefficients A(m, l)(x) of {J, e^l} along e^m.
std::vector<std::vector<GradedPoly>> endomorphism_of(const BracketData& b, const GradedPoly& J);
/// Generalized complex structure of a symplectic form, in standard odd coordinates (v, xi).
Matrix gc_symplectic(const Matrix& omega);
/// Generalized complex structure diag(J, -J^*) of a complex structure J on R^n.
Matrix gc_complex(const Matrix& J);

struct GcsReport {
  bool square = false;     // {J,{J,e}} = -e on the frame
  bool nijenhuis = false;  // torsion vanishes on frame pairs
  bool cross_checked = false;
  bool cross = false;      // {{Theta,J},J} = -Theta
  std::string witness;
  bool ok() const { return square && nijenhuis && (!cross_checked || cross); }
};

GcsReport gcs_report(const CourantScenario& s, const GradedPoly& J, const std::vector<GradedPoly>& frame);
bool gcs_check(const CourantScenario& s, const GradedPoly& J, const std::vector<GradedPoly>& frame);

/// All odd generators, the default frame for GC checks.
std::vector<GradedPoly> odd_frame(const ChartPtr& chart);

/// Random element of the given degree with x-coefficients of degree <= max_x_degree.
GradedPoly random_homogeneous(const ChartPtr& chart, std::mt19937_64& rng, int degree, int max_x_degree,
                              int n_terms = 3);

}  // namespace grc
