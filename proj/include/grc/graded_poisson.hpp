#pragma once

#include "grc/graded_algebra.hpp"

#include <functional>

namespace grc {

/// Canonical degree -2 bracket data: {p_i, x^j} = delta, {e^mu, e^nu} = metric(mu, nu).
class BracketData {
 public:
  BracketData(ChartPtr chart, Matrix metric);

  const ChartPtr& chart_ptr() const { return chart_; }
  const Chart& chart() const { return *chart_; }
  const Matrix& metric() const { return metric_; }
  const Matrix& metric_inverse() const { return metric_inverse_; }

  /// {e^mu, e^nu} as a polynomial (constant).
  GradedPoly pairing(int mu, int nu) const;

 private:
  ChartPtr chart_;
  Matrix metric_;
  Matrix metric_inverse_;
};

using BracketPtr = std::shared_ptr<const BracketData>;

GradedPoly poisson(const BracketData& b, const GradedPoly& f, const GradedPoly& g);

/// f -> {h, f}; h must be homogeneous.
std::function<GradedPoly(const GradedPoly&)> hamiltonian_field(const BracketData& b, const GradedPoly& h);

/// det({p, x}) != 0 and det(metric) != 0; point-independent for canonical charts.
bool nondegeneracy_check(const BracketData& b, const std::vector<Rational>& point);

/// sum_k ad_B^k(f)/k! for a degree-2 B; throws DomainError when ad_B is not nilpotent on f.
GradedPoly exp_adjoint(const BracketData& b, const GradedPoly& B, const GradedPoly& f);

/// Hyperbolic form [[0, I], [I, 0]] of size 2n.
Matrix hyperbolic_metric(int n);

}  // namespace grc
