// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "shiftkernel/detail/parallel.hpp"

namespace shiftkernel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelFamily { Gaussian, Cauchy, Exponential, IMQ };

inline const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Cauchy: return "cauchy";
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::IMQ: return "imq";
  }
  return "?";
}

/// Scalar positive-definite kernel with its bandwidth. The bandwidth enters
/// differently per family: Gaussian uses exp(-gamma*r^2), Cauchy and
/// Exponential divide by gamma^2, IMQ adds gamma^2 under the root.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double gamma = 1e-2;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw std::invalid_argument("KernelSpec: gamma must be positive, got " +
                                  std::to_string(gamma));
  }

  // Value of k(x,x); also the family's bound kappa^2 on the diagonal.
  double diagonal_value() const {
    return family == KernelFamily::IMQ ? 1.0 / gamma : 1.0;
  }
};

namespace detail {

inline double kernel_from_sqdist(const KernelSpec& spec, double r2) {
  switch (spec.family) {
    case KernelFamily::Gaussian:
      return std::exp(-spec.gamma * r2);
    case KernelFamily::Cauchy:
      return 1.0 / (1.0 + r2 / (spec.gamma * spec.gamma));
    case KernelFamily::Exponential:
      return std::exp(-std::sqrt(r2) / (spec.gamma * spec.gamma));
    case KernelFamily::IMQ:
      return 1.0 / std::sqrt(spec.gamma * spec.gamma + r2);
  }
  throw std::logic_error("unreachable kernel family");
}

// Exact squared distance, no norm-expansion trick (avoids cancellation).
inline double sqdist(const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& t) {
  return (x - t).squaredNorm();
}

}  // namespace detail

inline double eval_kernel(const KernelSpec& spec,
                          const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Vector>& t) {
  spec.validate();
  if (x.size() != t.size())
    throw std::invalid_argument("eval_kernel: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(t.size()) + ")");
  if (!x.allFinite() || !t.allFinite())
    throw std::invalid_argument("eval_kernel: non-finite input");
  return detail::kernel_from_sqdist(spec, detail::sqdist(x, t));
}

/// Gram matrix K with K(i,j) = k(x_i, x_j), rows of X as points.
/// Assembles the upper triangle and mirrors it, so K is exactly symmetric.
inline Matrix gram(const KernelSpec& spec, const Eigen::Ref<const Matrix>& X) {
  spec.validate();
  const Eigen::Index n = X.rows();
  if (n < 1) throw std::invalid_argument("gram: empty input matrix");
  if (!X.allFinite()) throw std::invalid_argument("gram: non-finite input");
  Matrix K(n, n);
  const double diag = spec.diagonal_value();
  detail::parallel_for(0, static_cast<int>(n), [&](int i) {
    K(i, i) = diag;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v =
          detail::kernel_from_sqdist(spec, detail::sqdist(X.row(i), X.row(j)));
      K(i, j) = v;
      K(j, i) = v;
    }
  });
  return K;
}

/// Optional fast path: squared distances via the norm-expansion identity with
/// a clamp-at-zero guard. Agrees with gram() to rounding; not used by default.
inline Matrix gram_expanded(const KernelSpec& spec,
                            const Eigen::Ref<const Matrix>& X) {
  spec.validate();
  const Eigen::Index n = X.rows();
  if (n < 1) throw std::invalid_argument("gram: empty input matrix");
  const Vector sq = X.rowwise().squaredNorm();
  Matrix D = (-2.0 * (X * X.transpose())).colwise() + sq;
  D.rowwise() += sq.transpose();
  D = D.cwiseMax(0.0);
  Matrix K(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      K(i, j) = detail::kernel_from_sqdist(spec, D(i, j));
  K.diagonal().setConstant(spec.diagonal_value());
  return K;
}

/// k_{x,n} = (k(x, x_1), ..., k(x, x_n))^T for one evaluation point.
inline Vector cross_kernel_vector(const KernelSpec& spec,
                                  const Eigen::Ref<const Matrix>& X,
                                  const Eigen::Ref<const Vector>& x) {
  spec.validate();
  if (x.size() != X.cols())
    throw std::invalid_argument(
        "cross_kernel_vector: dimension mismatch (point has " +
        std::to_string(x.size()) + " features, matrix has " +
        std::to_string(X.cols()) + ")");
  if (!x.allFinite() || !X.allFinite())
    throw std::invalid_argument("cross_kernel_vector: non-finite input");
  Vector k(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    k(i) = detail::kernel_from_sqdist(spec, detail::sqdist(X.row(i), x));
  return k;
}

/// Cross-kernel block: column j holds k_{x_j,n} for row j of Xq.
inline Matrix cross_kernel_matrix(const KernelSpec& spec,
                                  const Eigen::Ref<const Matrix>& X,
                                  const Eigen::Ref<const Matrix>& Xq) {
  spec.validate();
  if (Xq.cols() != X.cols())
    throw std::invalid_argument("cross_kernel_matrix: dimension mismatch");
  Matrix K(X.rows(), Xq.rows());
  detail::parallel_for(0, static_cast<int>(Xq.rows()), [&](int j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      K(i, j) =
          detail::kernel_from_sqdist(spec, detail::sqdist(X.row(i), Xq.row(j)));
  });
  return K;
}

}  // namespace shiftkernel
