// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "shiftkernel/kernels.hpp"

namespace shiftkernel {

/// Estimated importance weights beta(x_i) on the source sample.
/// beta is the clipped vector actually used downstream; raw_beta keeps the
/// unconstrained least-squares solution for diagnostics.
struct WeightEstimate {
  Vector beta;
  double alpha = 0.0;
  Vector raw_beta;
};

inline constexpr double kDefaultBetaCap = 1e6;

/// KuLSIF: solve (K + alpha*n*I) beta = F with F_j = (n/m) sum_i k(x'_i, x_j),
/// then clip to [0, b_cap]. The kernel here may differ from the estimator's.
inline WeightEstimate kulsif_weights(const KernelSpec& spec,
                                     const Eigen::Ref<const Matrix>& Xs,
                                     const Eigen::Ref<const Matrix>& Xt,
                                     double alpha,
                                     double b_cap = kDefaultBetaCap) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("kulsif_weights: alpha must be positive");
  if (Xs.rows() < 1 || Xt.rows() < 1)
    throw std::invalid_argument("kulsif_weights: empty sample");
  if (Xs.cols() != Xt.cols())
    throw std::invalid_argument(
        "kulsif_weights: source/target dimension mismatch");
  const Eigen::Index n = Xs.rows();
  const Eigen::Index m = Xt.rows();

  Matrix A = gram(spec, Xs);
  const Vector F = (static_cast<double>(n) / static_cast<double>(m)) *
                   cross_kernel_matrix(spec, Xs, Xt).rowwise().sum();
  A.diagonal().array() += alpha * static_cast<double>(n);

  Eigen::LDLT<Matrix> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("kulsif_weights: factorization failed");
  WeightEstimate w;
  w.alpha = alpha;
  w.raw_beta = ldlt.solve(F);
  const double resid = (A * w.raw_beta - F).norm();
  if (resid > 1e-8 * std::max(F.norm(), 1.0))
    throw std::runtime_error("kulsif_weights: solve residual too large");

  if ((w.raw_beta.array() > b_cap).any())
    std::cerr << "kulsif_weights: warning: weights exceed cap " << b_cap
              << "; boundedness assumption looks violated, clipping\n";
  w.beta = w.raw_beta.cwiseMax(0.0).cwiseMin(b_cap);
  return w;
}

/// Quasi-optimality selection: over a strictly decreasing alpha grid, pick
/// the left endpoint of the consecutive pair with the smallest solution
/// change ||beta(a_{j+1}) - beta(a_j)||; ties go to the smallest index.
inline double select_alpha_quasi_opt(const KernelSpec& spec,
                                     const Eigen::Ref<const Matrix>& Xs,
                                     const Eigen::Ref<const Matrix>& Xt,
                                     const std::vector<double>& grid) {
  if (grid.size() < 2)
    throw std::invalid_argument(
        "select_alpha_quasi_opt: grid needs at least 2 entries");
  for (std::size_t j = 0; j + 1 < grid.size(); ++j)
    if (!(grid[j] > grid[j + 1]) || !(grid[j + 1] > 0.0))
      throw std::invalid_argument(
          "select_alpha_quasi_opt: grid must be strictly decreasing and "
          "positive");

  std::vector<Vector> raw(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    raw[j] = kulsif_weights(spec, Xs, Xt, grid[j]).raw_beta;

  std::size_t best = 0;
  double best_diff = (raw[1] - raw[0]).norm();
  for (std::size_t j = 1; j + 1 < grid.size(); ++j) {
    const double diff = (raw[j + 1] - raw[j]).norm();
    if (diff < best_diff) {
      best_diff = diff;
      best = j;
    }
  }
  return grid[best];
}

inline std::vector<double> default_alpha_grid() {
  std::vector<double> g(10);
  double a = 1.0;
  for (auto& v : g) {
    v = a;
    a *= 0.25;
  }
  return g;
}

/// Entrywise square root; the diagonal of B^{1/2}.
inline Vector sqrt_weight_matrix(const WeightEstimate& w) {
  return w.beta.cwiseSqrt();
}

inline Vector sqrt_weights(const Eigen::Ref<const Vector>& beta) {
  if ((beta.array() < 0.0).any())
    throw std::invalid_argument("sqrt_weights: negative weight");
  return beta.cwiseSqrt();
}

}  // namespace shiftkernel
