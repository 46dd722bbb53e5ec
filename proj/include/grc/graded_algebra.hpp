#pragma once

#include "grc/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace grc {

enum class GenKind { X, E, P };

/// A chart generator: x^i (degree 0), e^mu (degree 1) or p_I (degree 2); indices are 0-based.
struct Gen {
  GenKind kind;
  int index;
  int degree() const { return kind == GenKind::X ? 0 : kind == GenKind::E ? 1 : 2; }
  friend bool operator==(const Gen&, const Gen&) = default;
  friend auto operator<=>(const Gen&, const Gen&) = default;
};

inline Gen xg(int i) { return {GenKind::X, i}; }
inline Gen eg(int i) { return {GenKind::E, i}; }
inline Gen pg(int i) { return {GenKind::P, i}; }

/// Global coordinate chart of a degree-2 manifold.
class Chart {
 public:
  static constexpr int kMaxOdd = 64;

  /// Empty name lists default to x1.., e1.., p1...
  Chart(int n_x, int n_e, int n_p, std::vector<std::string> x_names = {},
        std::vector<std::string> e_names = {}, std::vector<std::string> p_names = {});

  int n_x() const { return n_x_; }
  int n_e() const { return n_e_; }
  int n_p() const { return n_p_; }
  int count(GenKind k) const { return k == GenKind::X ? n_x_ : k == GenKind::E ? n_e_ : n_p_; }

  const std::string& name(Gen g) const;
  /// Resolves a display name, or the index form x<k>/e<k>/p<k>.
  std::optional<Gen> lookup(const std::string& name) const;
  bool valid(Gen g) const { return g.index >= 0 && g.index < count(g.kind); }

  friend bool operator==(const Chart&, const Chart&) = default;

 private:
  int n_x_, n_e_, n_p_;
  std::vector<std::string> names_[3];
};

using ChartPtr = std::shared_ptr<const Chart>;

/// x^a e^{mu_1}...e^{mu_k} p^b with mu_1 < ... < mu_k (bit mask).
struct Monomial {
  std::vector<std::uint16_t> x;
  std::uint64_t e = 0;
  std::vector<std::uint16_t> p;

  static Monomial unit(const Chart& c);
  int odd_count() const;
  int degree() const;
  int x_degree() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Canonical order: number of odd factors, odd indices, p exponents, x exponents.
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sign of e^a * e^b rewritten in increasing order; 0 when they share a factor.
int odd_product_sign(std::uint64_t a, std::uint64_t b);

/// Normal-form element of the graded-commutative coordinate algebra.
class GradedPoly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  GradedPoly() = default;
  explicit GradedPoly(ChartPtr chart) : chart_(std::move(chart)) {}

  static GradedPoly constant(ChartPtr chart, const Rational& c);
  static GradedPoly generator(ChartPtr chart, Gen g);
  static GradedPoly monomial(ChartPtr chart, Monomial m, const Rational& c);

  const ChartPtr& chart_ptr() const { return chart_; }
  const Chart& chart() const { return *chart_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c*m, erasing the entry when it cancels.
  void add_term(const Monomial& m, const Rational& c);

  GradedPoly& operator+=(const GradedPoly& o);
  GradedPoly& operator-=(const GradedPoly& o);
  GradedPoly& operator*=(const Rational& c);

  friend GradedPoly operator+(GradedPoly a, const GradedPoly& b) { return a += b; }
  friend GradedPoly operator-(GradedPoly a, const GradedPoly& b) { return a -= b; }
  friend GradedPoly operator-(GradedPoly a) { return a *= Rational(-1); }
  friend GradedPoly operator*(GradedPoly a, const Rational& c) { return a *= c; }
  friend GradedPoly operator*(const Rational& c, GradedPoly a) { return a *= c; }
  friend GradedPoly operator*(const GradedPoly& a, const GradedPoly& b);
  friend bool operator==(const GradedPoly& a, const GradedPoly& b);

  /// Common degree of all terms (0 for the zero element), absent when inhomogeneous.
  std::optional<int> degree() const;
  GradedPoly homogeneous_part(int degree) const;
  /// Largest total x-degree among the coefficients.
  int max_x_degree() const;
  int max_odd_count() const;
  int max_p_degree() const;
  /// True when no term involves any of the given generators.
  bool independent_of(const std::vector<Gen>& gens) const;
  bool involves(Gen g) const;
  /// Constant term of a polynomial with no e or p factors.
  std::optional<Rational> as_constant() const;

  std::string str() const;

 private:
  ChartPtr chart_;
  Terms terms_;
};

struct RawTerm {
  std::vector<Gen> factors;
  Rational coefficient;
};

void require_same_chart(const GradedPoly& a, const GradedPoly& b);

GradedPoly normalize(const std::vector<RawTerm>& raw, const ChartPtr& chart);
GradedPoly multiply(const GradedPoly& f, const GradedPoly& g);
std::optional<int> degree(const GradedPoly& f);

/// Left graded derivative with respect to a generator.
GradedPoly partial_derivative(const GradedPoly& f, Gen g);
/// Right derivative; differs from the left one by (-1)^{|f|-1} on odd generators.
GradedPoly right_derivative(const GradedPoly& f, Gen g);

/// Simultaneous substitution; each replacement must share the generator's degree.
GradedPoly substitute(const GradedPoly& f, const std::map<Gen, GradedPoly>& assignments);
/// Replaces every x^i by point[i]; odd and p factors are kept.
GradedPoly evaluate_x(const GradedPoly& f, const std::vector<Rational>& point);

/// Coefficient function (in x) of the part with the given odd mask and p exponents.
GradedPoly coefficient(const GradedPoly& f, std::uint64_t odd_mask, const std::vector<std::uint16_t>& p_exponents);
/// Coefficients c_mu(x) of a degree-1 element sum c_mu e^mu.
std::vector<GradedPoly> linear_coefficients(const GradedPoly& f);
GradedPoly from_linear_coefficients(const ChartPtr& chart, const std::vector<GradedPoly>& c);

/// Expression grammar: terms such as `3/2 * x1^2 * e1*e3 * p2`, combined with + and -,
/// parentheses allowed. Throws InputError with a column on failure.
GradedPoly parse_poly(const std::string& text, const ChartPtr& chart);

}  // namespace grc
