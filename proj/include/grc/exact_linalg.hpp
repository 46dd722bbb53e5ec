#pragma once

#include "grc/rational.hpp"

#include <optional>
#include <vector>

namespace grc {

/// Reduced row echelon form with first-nonzero (lexicographic) pivoting.
/// Exact for field scalars; never compares magnitudes.
template <typename Scalar>
struct RowEchelon {
  DynamicMatrix<Scalar> reduced;
  std::vector<int> pivots;  // pivot column of each nonzero row
};

template <typename Derived>
RowEchelon<typename Derived::Scalar> rref(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  DynamicMatrix<Scalar> r = m;
  std::vector<int> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < r.cols() && row < r.rows(); ++col) {
    Eigen::Index sel = -1;
    for (Eigen::Index i = row; i < r.rows(); ++i)
      if (r(i, col) != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != row) r.row(sel).swap(r.row(row));
    const Scalar inv = Scalar(1) / r(row, col);
    for (Eigen::Index j = col; j < r.cols(); ++j) r(row, j) *= inv;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      if (i == row || r(i, col) == 0) continue;
      const Scalar f = r(i, col);
      for (Eigen::Index j = col; j < r.cols(); ++j) r(i, j) -= f * r(row, j);
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  return {std::move(r), std::move(pivots)};
}

template <typename Derived>
int rank(const Eigen::MatrixBase<Derived>& m) {
  return static_cast<int>(rref(m).pivots.size());
}

template <typename Derived>
bool is_zero(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) return false;
  return true;
}

template <typename A, typename B>
bool equal(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && is_zero(a - b);
}

/// Basis of {v : m v = 0} as columns, one per free column in increasing order.
template <typename Derived>
DynamicMatrix<typename Derived::Scalar> nullspace(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto e = rref(m);
  const Eigen::Index n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (int p : e.pivots) is_pivot[p] = true;
  DynamicMatrix<Scalar> basis(n, n - static_cast<Eigen::Index>(e.pivots.size()));
  basis.setZero();
  Eigen::Index k = 0;
  for (Eigen::Index free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    basis(free, k) = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) basis(e.pivots[r], k) = -e.reduced(r, free);
    ++k;
  }
  return basis;
}

/// Columns of m that are not combinations of earlier columns.
template <typename Derived>
DynamicMatrix<typename Derived::Scalar> column_basis(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto e = rref(m);
  DynamicMatrix<Scalar> out(m.rows(), static_cast<Eigen::Index>(e.pivots.size()));
  for (std::size_t k = 0; k < e.pivots.size(); ++k) out.col(k) = m.col(e.pivots[k]);
  return out;
}

template <typename Derived>
std::optional<DynamicMatrix<typename Derived::Scalar>> inverse(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) return std::nullopt;
  const Eigen::Index n = m.rows();
  DynamicMatrix<Scalar> aug(n, 2 * n);
  aug << m, DynamicMatrix<Scalar>::Identity(n, n);
  const auto e = rref(aug);
  if (static_cast<Eigen::Index>(e.pivots.size()) < n || (n > 0 && e.pivots[n - 1] >= n))
    return std::nullopt;
  return DynamicMatrix<Scalar>(e.reduced.rightCols(n));
}

template <typename Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  DynamicMatrix<Scalar> a = m;
  const Eigen::Index n = a.rows();
  Scalar det(1);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index sel = -1;
    for (Eigen::Index i = c; i < n; ++i)
      if (a(i, c) != 0) {
        sel = i;
        break;
      }
    if (sel < 0) return Scalar(0);
    if (sel != c) {
      a.row(sel).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index i = c + 1; i < n; ++i) {
      if (a(i, c) == 0) continue;
      const Scalar f = a(i, c) / a(c, c);
      a.row(i) -= f * a.row(c);
    }
  }
  return det;
}

/// Some x with m x = b (free variables zero), or nothing when inconsistent.
template <typename DA, typename DB>
std::optional<DynamicMatrix<typename DA::Scalar>> solve(const Eigen::MatrixBase<DA>& m,
                                                        const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  DynamicMatrix<Scalar> aug(m.rows(), m.cols() + b.cols());
  aug << m, b;
  const auto e = rref(aug);
  DynamicMatrix<Scalar> x = DynamicMatrix<Scalar>::Zero(m.cols(), b.cols());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] >= m.cols()) return std::nullopt;
    x.row(e.pivots[r]) = e.reduced.row(r).tail(b.cols());
  }
  return x;
}

/// Extends the columns of `sub` to a basis of the ambient space using
/// standard basis vectors in increasing order; returns only the added columns.
template <typename Derived>
DynamicMatrix<typename Derived::Scalar> complement(const Eigen::MatrixBase<Derived>& sub) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = sub.rows();
  DynamicMatrix<Scalar> aug(n, sub.cols() + n);
  aug << sub, DynamicMatrix<Scalar>::Identity(n, n);
  const auto e = rref(aug);
  std::vector<int> extra;
  for (int p : e.pivots)
    if (p >= sub.cols()) extra.push_back(p - static_cast<int>(sub.cols()));
  DynamicMatrix<Scalar> out = DynamicMatrix<Scalar>::Zero(n, static_cast<Eigen::Index>(extra.size()));
  for (std::size_t k = 0; k < extra.size(); ++k) out(extra[k], k) = 1;
  return out;
}

/// Intersection of two column spans, returned as a column basis.
template <typename DA, typename DB>
DynamicMatrix<typename DA::Scalar> intersection(const Eigen::MatrixBase<DA>& u,
                                                const Eigen::MatrixBase<DB>& w) {
  using Scalar = typename DA::Scalar;
  DynamicMatrix<Scalar> both(u.rows(), u.cols() + w.cols());
  both << u, -w;
  const DynamicMatrix<Scalar> ker = nullspace(both);
  return column_basis(DynamicMatrix<Scalar>(u * ker.topRows(u.cols())));
}

/// True when every column of w lies in the span of the columns of u.
template <typename DA, typename DB>
bool contains(const Eigen::MatrixBase<DA>& u, const Eigen::MatrixBase<DB>& w) {
  using Scalar = typename DA::Scalar;
  DynamicMatrix<Scalar> both(u.rows(), u.cols() + w.cols());
  both << u, w;
  return rank(both) == rank(u);
}

}  // namespace grc
