#pragma once

#include "grc/exact_linalg.hpp"

#include <optional>
#include <utility>

namespace grc {

/// Fiber with an exact symmetric nondegenerate form.
template <typename Scalar>
class QuadraticSpace {
 public:
  explicit QuadraticSpace(DynamicMatrix<Scalar> form) : form_(std::move(form)) {
    if (form_.rows() != form_.cols()) throw InputError("quadratic space: form must be square");
    if (!equal(form_, form_.transpose())) throw InputError("quadratic space: form is not symmetric");
    if (form_.rows() > 0 && determinant(form_) == 0) throw InputError("quadratic space: form is degenerate");
  }
  Eigen::Index dim() const { return form_.rows(); }
  const DynamicMatrix<Scalar>& form() const { return form_; }

 private:
  DynamicMatrix<Scalar> form_;
};

/// Subspace given by a basis of full column rank.
template <typename Scalar>
class Subspace {
 public:
  explicit Subspace(DynamicMatrix<Scalar> basis) : basis_(std::move(basis)) {
    if (rank(basis_) != basis_.cols()) throw DomainError("subspace: basis columns are dependent");
  }
  /// Span of arbitrary columns; dependent ones are dropped.
  static Subspace span(const DynamicMatrix<Scalar>& columns) { return Subspace(column_basis(columns)); }
  static Subspace zero(Eigen::Index n) { return Subspace(DynamicMatrix<Scalar>(n, 0)); }
  static Subspace whole(Eigen::Index n) { return Subspace(DynamicMatrix<Scalar>::Identity(n, n)); }

  Eigen::Index dim() const { return basis_.cols(); }
  Eigen::Index ambient() const { return basis_.rows(); }
  const DynamicMatrix<Scalar>& basis() const { return basis_; }
  bool contains(const Subspace& o) const { return grc::contains(basis_, o.basis_); }
  bool contains_vectors(const DynamicMatrix<Scalar>& w) const { return grc::contains(basis_, w); }
  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient() == b.ambient() && a.dim() == b.dim() && a.contains(b);
  }

 private:
  DynamicMatrix<Scalar> basis_;
};

using RationalSpace = QuadraticSpace<Rational>;
using RationalSubspace = Subspace<Rational>;

namespace detail {
template <typename Scalar>
void require_ambient(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& K, const char* what) {
  if (K.ambient() != V.dim()) throw InputError(std::string(what) + ": subspace lives in a different space");
}
}  // namespace detail

template <typename Scalar>
Subspace<Scalar> orthogonal(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& K) {
  detail::require_ambient(V, K, "orthogonal");
  const DynamicMatrix<Scalar> m = K.basis().transpose() * V.form();
  Subspace<Scalar> out(nullspace(m));
  if (out.dim() != V.dim() - K.dim()) throw InternalError("orthogonal: dimension count failed");
  return out;
}

template <typename Scalar>
DynamicMatrix<Scalar> gram(const QuadraticSpace<Scalar>& V, const DynamicMatrix<Scalar>& a, const DynamicMatrix<Scalar>& b) {
  return a.transpose() * V.form() * b;
}

template <typename Scalar>
bool is_isotropic(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& K) {
  detail::require_ambient(V, K, "is_isotropic");
  return is_zero(gram(V, K.basis(), K.basis()));
}

template <typename Scalar>
bool is_lagrangian(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& K) {
  return is_isotropic(V, K) && 2 * K.dim() == V.dim();
}

template <typename Scalar>
Subspace<Scalar> intersect(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
  return Subspace<Scalar>(intersection(a.basis(), b.basis()));
}

template <typename Scalar>
Subspace<Scalar> sum(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
  DynamicMatrix<Scalar> both(a.ambient(), a.dim() + b.dim());
  both << a.basis(), b.basis();
  return Subspace<Scalar>::span(both);
}

/// Graph {(X, B X)} in V + V* with the pairing (X, a), (Y, b) -> a(Y) + b(X);
/// coordinates are ordered (X, a).
template <typename Scalar>
Subspace<Scalar> graph(const DynamicMatrix<Scalar>& B) {
  const Eigen::Index n = B.rows();
  DynamicMatrix<Scalar> basis(2 * n, n);
  basis << DynamicMatrix<Scalar>::Identity(n, n), B;
  return Subspace<Scalar>(basis);
}

/// K^perp / K realized on a section of K^perp complementary to K.
template <typename Scalar>
struct Quotient {
  QuadraticSpace<Scalar> space;
  DynamicMatrix<Scalar> section;  // columns span a complement of K in K^perp
  DynamicMatrix<Scalar> kernel;   // basis of K
  /// Quotient coordinates of vectors in K^perp; nothing when some column leaves K^perp.
  std::optional<DynamicMatrix<Scalar>> project(const DynamicMatrix<Scalar>& w) const {
    DynamicMatrix<Scalar> frame(section.rows(), section.cols() + kernel.cols());
    frame << section, kernel;
    auto c = solve(frame, w);
    if (!c) return std::nullopt;
    return DynamicMatrix<Scalar>(c->topRows(section.cols()));
  }
};

template <typename Scalar>
Quotient<Scalar> quotient_space(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& K) {
  if (!is_isotropic(V, K)) throw DomainError("quotient_space: K is not isotropic");
  const Subspace<Scalar> perp = orthogonal(V, K);
  DynamicMatrix<Scalar> both(V.dim(), K.dim() + perp.dim());
  both << K.basis(), perp.basis();
  const auto e = rref(both);
  std::vector<int> picked;
  for (int p : e.pivots)
    if (p >= K.dim()) picked.push_back(p);
  DynamicMatrix<Scalar> section(V.dim(), static_cast<Eigen::Index>(picked.size()));
  for (std::size_t k = 0; k < picked.size(); ++k) section.col(k) = both.col(picked[k]);
  QuadraticSpace<Scalar> q(gram(V, section, section));
  return {std::move(q), std::move(section), K.basis()};
}

template <typename Scalar>
struct SplitDecomposition {
  Subspace<Scalar> R;  // (T + K)^perp, nondegenerate, K^perp = K + R
  Subspace<Scalar> T;  // isotropic, pairs nondegenerately with K
};

/// Constructive K^perp = K + R with an isotropic T dual to K. When L is given the
/// complement is seeded from L so that L = (L cap R) + (L cap K) + (L cap T).
template <typename Scalar>
SplitDecomposition<Scalar> split_decomposition(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& K,
                                               const std::optional<Subspace<Scalar>>& L = std::nullopt) {
  using M = DynamicMatrix<Scalar>;
  if (!is_isotropic(V, K)) throw DomainError("split_decomposition: K is not isotropic");
  const Eigen::Index n = V.dim(), k = K.dim();
  const Subspace<Scalar> perp = orthogonal(V, K);
  M seed(n, 0);
  M pool = M::Identity(n, n);
  if (L) {
    detail::require_ambient(V, *L, "split_decomposition");
    if (!is_lagrangian(V, *L)) throw DomainError("split_decomposition: L is not lagrangian");
    // I with (L cap K^perp) + I = L
    const M lk = intersection(L->basis(), perp.basis());
    M aug(n, lk.cols() + L->dim());
    aug << lk, L->basis();
    const auto e = rref(aug);
    std::vector<int> cols;
    for (int p : e.pivots)
      if (p >= lk.cols()) cols.push_back(p);
    seed.resize(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) seed.col(i) = aug.col(cols[i]);
    // extend inside I^perp so that the seed stays orthogonal to the extension
    if (seed.cols() > 0) pool = nullspace(M(seed.transpose() * V.form()));
  }
  M C = seed;
  for (Eigen::Index j = 0; j < pool.cols() && C.cols() < k; ++j) {
    M trial(n, C.cols() + 1);
    trial << C, pool.col(j);
    if (rank(M(trial.transpose() * V.form() * K.basis())) == trial.cols()) C = trial;
  }
  if (C.cols() != k) throw InternalError("split_decomposition: no complement of K^perp found");
  const M Mp = C.transpose() * V.form() * K.basis();
  const M Q = gram(V, C, C);
  const auto Minv = inverse(Mp);
  if (!Minv) throw InternalError("split_decomposition: complement pairs degenerately with K");
  const M T = C - Scalar(1) / Scalar(2) * K.basis() * (*Minv) * Q;
  M TK(n, 2 * k);
  TK << T, K.basis();
  SplitDecomposition<Scalar> out{orthogonal(V, Subspace<Scalar>(TK)), Subspace<Scalar>(T)};
  // identities the construction guarantees
  if (!is_isotropic(V, out.T) || rank(M(gram(V, T, K.basis()))) != k)
    throw InternalError("split_decomposition: T is not an isotropic dual of K");
  if (!perp.contains(out.R) || out.R.dim() + k != perp.dim() ||
      (out.R.dim() > 0 && determinant(M(gram(V, out.R.basis(), out.R.basis()))) == 0))
    throw InternalError("split_decomposition: R is not a nondegenerate complement of K in K^perp");
  if (L) {
    const Eigen::Index total = intersect(*L, out.R).dim() + intersect(*L, K).dim() + intersect(*L, out.T).dim();
    if (total != L->dim()) throw DomainError("split_decomposition: L does not split along the decomposition");
  }
  return out;
}

/// Image of L cap K^perp in K^perp / K, in quotient coordinates.
template <typename Scalar>
Subspace<Scalar> lagrangian_quotient(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& L,
                                     const Quotient<Scalar>& q) {
  const DynamicMatrix<Scalar> perp = nullspace(DynamicMatrix<Scalar>(q.kernel.transpose() * V.form()));
  const DynamicMatrix<Scalar> meet = intersection(L.basis(), perp);
  auto coords = q.project(meet);
  if (!coords) throw InternalError("lagrangian_quotient: projection left K^perp");
  return Subspace<Scalar>::span(*coords);
}

template <typename Scalar>
Subspace<Scalar> lagrangian_quotient(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& L,
                                     const Subspace<Scalar>& K) {
  return lagrangian_quotient(V, L, quotient_space(V, K));
}

/// Skew D with D(K) in K inducing delta on the quotient; A acts on K (zero by default).
template <typename Scalar>
DynamicMatrix<Scalar> lift_derivation(const QuadraticSpace<Scalar>& V, const Subspace<Scalar>& K,
                                      const DynamicMatrix<Scalar>& delta,
                                      const std::optional<DynamicMatrix<Scalar>>& A = std::nullopt) {
  using M = DynamicMatrix<Scalar>;
  const Quotient<Scalar> q = quotient_space(V, K);
  const Eigen::Index r = q.space.dim(), k = K.dim(), n = V.dim();
  if (delta.rows() != r || delta.cols() != r) throw InputError("lift_derivation: delta has the wrong size");
  const M& F = q.space.form();
  if (!is_zero(M(delta.transpose() * F + F * delta))) throw DomainError("lift_derivation: delta is not skew");
  const M a = A ? *A : M::Zero(k, k);
  if (a.rows() != k || a.cols() != k) throw InputError("lift_derivation: A has the wrong size");
  const SplitDecomposition<Scalar> sd = split_decomposition(V, K);
  // representatives of the quotient basis inside R
  M frame(n, sd.R.dim() + k);
  frame << sd.R.basis(), K.basis();
  auto c = solve(frame, q.section);
  if (!c) throw InternalError("lift_derivation: section leaves K^perp");
  const M Rb = sd.R.basis() * c->topRows(sd.R.dim());
  const M N = gram(V, sd.T.basis(), K.basis());
  const auto Ninv = inverse(N);
  if (!Ninv) throw InternalError("lift_derivation: T does not pair with K");
  const M B = -Ninv->transpose() * a.transpose() * N.transpose();
  M basis(n, n);
  basis << Rb, K.basis(), sd.T.basis();
  M block = M::Zero(n, n);
  block.block(0, 0, r, r) = delta;
  block.block(r, r, k, k) = a;
  block.block(r + k, r + k, k, k) = B;
  const auto inv = inverse(basis);
  if (!inv) throw InternalError("lift_derivation: R + K + T is not a basis");
  const M D = basis * block * (*inv);
  if (!is_zero(M(D.transpose() * V.form() + V.form() * D))) throw InternalError("lift_derivation: lift is not skew");
  if (!contains(K.basis(), M(D * K.basis()))) throw InternalError("lift_derivation: lift does not preserve K");
  auto induced = q.project(D * q.section);
  if (!induced || !equal(*induced, delta)) throw InternalError("lift_derivation: induced map differs from delta");
  return D;
}

struct ExactnessResult {
  bool rank_condition = false;   // dim N - rk rho(K^perp) = rk F - rk rho(K)
  bool intersection_condition = false;  // rho(K^perp) cap F = rho(K)
  bool both() const { return rank_condition && intersection_condition; }
};

/// All subspaces live in the tangent space of N.
template <typename Scalar>
ExactnessResult exactness_conditions(Eigen::Index dim_N, const Subspace<Scalar>& F, const Subspace<Scalar>& rhoK,
                                     const Subspace<Scalar>& rhoKperp) {
  if (F.ambient() != dim_N || rhoK.ambient() != dim_N || rhoKperp.ambient() != dim_N)
    throw InputError("exactness_conditions: subspaces must live in T N");
  if (!rhoKperp.contains(rhoK)) throw DomainError("exactness_conditions: rho(K) is not inside rho(K^perp)");
  ExactnessResult r;
  r.rank_condition = dim_N - rhoKperp.dim() == F.dim() - rhoK.dim();
  r.intersection_condition = intersect(rhoKperp, F) == rhoK;
  return r;
}

}  // namespace grc
