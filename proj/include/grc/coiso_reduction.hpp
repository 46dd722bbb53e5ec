#pragma once

#include "grc/courant_core.hpp"
#include "grc/pseudo_linear.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace grc {

/// Vanishing ideal <x^A, k_b, P_c> in triangular form. The degree-1 generators are
/// e^{pivot_b} + (non-pivot e's), the degree-2 ones p_{c} + (surviving generators);
/// membership is decided by substituting these and setting x^A = 0.
class CoisotropicIdeal {
 public:
  CoisotropicIdeal(BracketPtr bracket, std::vector<int> A, std::vector<GradedPoly> k_frame = {},
                   std::vector<GradedPoly> p_generators = {});

  const BracketData& bracket() const { return *bracket_; }
  const BracketPtr& bracket_ptr() const { return bracket_; }
  const ChartPtr& chart_ptr() const { return bracket_->chart_ptr(); }
  const std::vector<int>& A() const { return A_; }
  const std::vector<int>& pivots() const { return pivots_; }  // B
  const std::vector<int>& C() const { return C_; }
  const std::vector<GradedPoly>& k_generators() const { return k_; }
  const std::vector<GradedPoly>& p_generators() const { return P_; }
  /// x^a, then the degree-1, then the degree-2 generators.
  std::vector<GradedPoly> generators() const;

  GradedPoly normal_form(const GradedPoly& f) const;
  bool contains(const GradedPoly& f) const { return normal_form(f).is_zero(); }
  /// Dimension count (m0 - |A|) + (m1 - |B|) + (m2 - |C|) of the cut-out submanifold.
  int total_dimension() const;

 private:
  BracketPtr bracket_;
  std::vector<int> A_, pivots_, C_;
  std::vector<GradedPoly> k_, P_;
  std::map<Gen, GradedPoly> subst_;
};

/// All pairwise generator brackets lie in the ideal.
bool is_coisotropic(const CoisotropicIdeal& I, std::string* witness = nullptr);
/// {f, gen} in I for every generator.
bool in_normalizer(const GradedPoly& f, const CoisotropicIdeal& I, std::string* witness = nullptr);

/// N = {x^A = 0}, K spanned by a frame, F spanned by d/dx^c (c in C), and
/// a flat frame of K^perp/K (default: derived from the coordinate frame).
struct GeometricCoisoData {
  std::vector<int> A;
  std::vector<GradedPoly> K;
  std::vector<int> C;
  std::optional<std::vector<GradedPoly>> flat;
};

/// Lifts of the coordinate frame of K^perp/K: e^mu corrected by partner generators.
std::vector<GradedPoly> default_flat_frame(const BracketPtr& b, const GeometricCoisoData& d);
std::vector<GradedPoly> flat_frame(const BracketPtr& b, const GeometricCoisoData& d);

CoisotropicIdeal ideal_from_data(const BracketPtr& b, const GeometricCoisoData& d);

bool reducible_symbolic(const CourantScenario& s, const CoisotropicIdeal& I, std::string* witness = nullptr);

/// Origin, unit points and seeded random points on N = {x^A = 0}.
std::vector<std::vector<Rational>> sample_points(const Chart& chart, const std::vector<int>& A, std::uint64_t seed,
                                                 int random_points = 5);

struct ReducibilityReport {
  std::array<bool, 4> r{{true, true, true, true}};
  std::array<std::string, 4> witness;
  bool all() const { return r[0] && r[1] && r[2] && r[3]; }
};

/// (R1) rho(K^perp) in TN, (R2) rho(K) in F, (R3) rho of flat lifts is F-projectable,
/// (R4) brackets of flat sections stay flat.
ReducibilityReport reducible_geometric(const CourantScenario& s, const GeometricCoisoData& d, std::uint64_t seed,
                                       int random_points = 5);

/// Reduced scenario plus the projection of reducible functions.
class Reduction {
 public:
  Reduction(CoisotropicIdeal ideal, CourantScenario reduced, std::map<Gen, Gen> survivors);
  const CourantScenario& scenario() const { return reduced_; }
  const CoisotropicIdeal& ideal() const { return ideal_; }
  /// Normal form re-expressed in the reduced chart; DomainError if a dropped generator remains.
  GradedPoly project(const GradedPoly& f) const;
  /// Same after restricting to the slice x^C = 0.
  GradedPoly project_on_slice(const GradedPoly& f) const;

 private:
  CoisotropicIdeal ideal_;
  CourantScenario reduced_;
  std::map<Gen, Gen> survivors_;
};

/// Requires the flat frame to consist of bare odd generators.
Reduction reduce(const CourantScenario& s, const CoisotropicIdeal& I, const std::vector<GradedPoly>& flat);
Reduction reduce(const CourantScenario& s, const GeometricCoisoData& d);

struct QuadraticReduction {
  bool normalizer = false;
  bool preserves_K = false;   // {J, k} in I
  bool preserves_flat = false;  // {J, s} flat
  GradedPoly J_red;
  GcsReport reduced_check;
};

QuadraticReduction reduce_quadratic(const CourantScenario& s, const GradedPoly& J, const GeometricCoisoData& d,
                                    const Reduction& red);

/// Lagrangian along N: pairings vanish mod I_N and the frame has rank m1/2 at the samples.
bool is_lagrangian_frame(const CoisotropicIdeal& I, const std::vector<GradedPoly>& L,
                         const std::vector<std::vector<Rational>>& samples, std::string* witness = nullptr);
/// <[[l_i, l_j]], l_k> = 0 identically.
bool is_involutive(const CourantScenario& s, const std::vector<GradedPoly>& L, std::string* witness = nullptr);

/// Frame of L cap K^perp along N; the pairing with K must be constant there.
std::vector<GradedPoly> meet_perp(const CoisotropicIdeal& I, const std::vector<GradedPoly>& L,
                                  const std::vector<GradedPoly>& K);

struct CleanReport {
  bool constant_rank = false;
  bool invariant = false;
  std::vector<int> ranks;  // dim(K cap L) per sample
  std::string witness;
  bool ok() const { return constant_rank && invariant; }
};

CleanReport clean_intersection(const std::vector<GradedPoly>& L, const GeometricCoisoData& d,
                               const CoisotropicIdeal& I, const std::vector<std::vector<Rational>>& samples);

struct DiracReduction {
  std::vector<GradedPoly> frame;
  bool lagrangian = false;
  bool involutive = false;
};

DiracReduction reduce_dirac(const std::vector<GradedPoly>& L, const CourantScenario& s, const GeometricCoisoData& d,
                            const Reduction& red, const std::vector<std::vector<Rational>>& samples);

/// Coefficient matrix (rows = frame elements, columns = odd generators) at a point.
Matrix frame_matrix(const std::vector<GradedPoly>& frame, const std::vector<Rational>& point);

}  // namespace grc
