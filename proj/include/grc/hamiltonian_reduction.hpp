#pragma once

#include "grc/coiso_reduction.hpp"

#include <optional>
#include <string>
#include <vector>

namespace grc {

/// Structure constants [u_i, u_j] = c(k, i, j) u_k.
struct LieAlgebra {
  int dim = 0;
  std::vector<Rational> c;  // (k*dim + i)*dim + j

  LieAlgebra() = default;
  explicit LieAlgebra(int n) : dim(n), c(static_cast<std::size_t>(n) * n * n, Rational(0)) {}
  Rational& operator()(int k, int i, int j) { return c[(static_cast<std::size_t>(k) * dim + i) * dim + j]; }
  const Rational& operator()(int k, int i, int j) const { return c[(static_cast<std::size_t>(k) * dim + i) * dim + j]; }
  Vector bracket(const Vector& u, const Vector& v) const;
  /// ad(u_i) as matrices.
  std::vector<Matrix> adjoint() const;

  static LieAlgebra abelian(int n) { return LieAlgebra(n); }
  static LieAlgebra so3();
  static LieAlgebra heisenberg();
  static LieAlgebra aff1();
};

struct Check {
  std::string name;
  bool pass = true;
  std::string witness;
};

struct CheckReport {
  std::vector<Check> checks;
  bool ok() const;
  /// Records a failure once per check name, keeping the first witness.
  void fail(const std::string& name, const std::string& witness);
  void pass(const std::string& name);
  bool passed(const std::string& name) const;
};

/// h[2] + a[1] + g with tau on a, lambda on h, varpi: a x a -> h and delta: h -> a -> g.
struct DGLA2Data {
  LieAlgebra g;
  int dim_a = 0, dim_h = 0;
  std::vector<Matrix> tau;     // per g basis element, dim_a x dim_a
  std::vector<Matrix> lambda;  // per g basis element, dim_h x dim_h
  std::vector<Vector> varpi;   // varpi(a_i, a_j) at i*dim_a + j
  Matrix delta_ha;             // dim_a x dim_h
  Matrix delta_ag;             // dim_g x dim_a

  Matrix tau_of(const Vector& u) const;
  Matrix lambda_of(const Vector& u) const;
  Vector varpi_of(const Vector& a1, const Vector& a2) const;
  /// 0 -> h -> a -> g -> 0 is exact.
  bool exact() const;
};

CheckReport validate_gla(const DGLA2Data& d);
CheckReport validate_dgla(const DGLA2Data& d);

/// Leibniz bracket on a with p: a -> g.
struct CourantAlgebraData {
  LieAlgebra g;
  int dim_a = 0;
  std::vector<Vector> bracket;  // [[a_i, a_j]] at i*dim_a + j
  Matrix p;                     // dim_g x dim_a

  Vector bracket_of(const Vector& a1, const Vector& a2) const;
};

CheckReport validate_courant_algebra(const CourantAlgebraData& c, bool require_exact = true);

CourantAlgebraData dgla_to_courant_algebra(const DGLA2Data& d);
/// h = ker p with the given embedding (columns), or the nullspace basis of p.
DGLA2Data courant_algebra_to_dgla(const CourantAlgebraData& c, const std::optional<Matrix>& embedding = std::nullopt);

/// g + h with [[(u1,h1),(u2,h2)]] = ([u1,u2], u1.h2); module[i] is the action of u_i on h.
CourantAlgebraData hemisemidirect(const LieAlgebra& g, const std::vector<Matrix>& module);
/// Embedding of h into g + h.
Matrix hemisemidirect_embedding(int dim_g, int dim_h);

struct HamAction {
  CourantScenario scenario;
  DGLA2Data dgla;
  std::vector<GradedPoly> phi;      // degree 2, per g basis element
  std::vector<GradedPoly> rho_a;    // degree 1, per a basis element
  std::vector<GradedPoly> mu_star;  // degree 0, per h basis element
};

void check_shapes(const HamAction& A);

/// Bracket morphism of the momentum map, symbolically and through conditions (a)-(d).
CheckReport validate_comoment(const HamAction& A);
/// {Theta, .} intertwines delta, symbolically and through conditions (a)-(c).
CheckReport validate_chain(const HamAction& A);

struct RegularityReport {
  std::vector<int> A;  // N = {x^A = 0}
  bool moment = false, rho_injective = false, locally_free = false;
  bool certified = false;  // constant coefficients, so the ranks hold on all of N
  std::string witness;
  bool ok() const { return moment && rho_injective && locally_free; }
};

/// Coordinates cut out by the moment map; DomainError unless its zero level is a coordinate subspace.
std::vector<int> zero_level_coordinates(const Chart& chart, const std::vector<GradedPoly>& mu_star);
RegularityReport regular_zero(const HamAction& A, const std::vector<std::vector<Rational>>& samples);
RegularityReport regular_zero(const HamAction& A, std::uint64_t seed, int random_points = 5);

GeometricCoisoData zero_level_data(const HamAction& A);

/// [[rho* df, .]] = 0 for f = x^i.
bool left_central_check(const CourantScenario& s, std::string* witness = nullptr);

HamAction from_reduction_data(const CourantScenario& s, const LieAlgebra& g, const std::vector<GradedPoly>& psi,
                              const std::vector<Matrix>& module, const std::vector<GradedPoly>& mu_star);

/// Theta minus v^i p_i is cubic in the v block.
bool is_exact_scenario(const CourantScenario& s);

struct ExtendedActionReport {
  CheckReport checks;
  bool extracond = false;
  bool isotropic = false;
  bool agree() const { return extracond == isotropic; }
};

ExtendedActionReport extended_action_check(const CourantScenario& s, const CourantAlgebraData& c,
                                           const std::vector<GradedPoly>& Psi, const std::vector<GradedPoly>& mu_star,
                                           std::uint64_t seed);

struct HamReduceOptions {
  std::optional<GradedPoly> J;
  std::optional<std::vector<GradedPoly>> L;
  std::uint64_t seed = 1;
  int random_points = 5;
};

struct HamReduction {
  GeometricCoisoData data;
  Reduction reduction;
  ExactnessResult exactness;
  std::optional<QuadraticReduction> J;
  std::optional<DiracReduction> L;
};

HamReduction ham_reduce(const HamAction& A, const HamReduceOptions& options);

}  // namespace grc
