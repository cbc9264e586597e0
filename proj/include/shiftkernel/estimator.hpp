// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "shiftkernel/kernels.hpp"
#include "shiftkernel/spectral.hpp"
#include "shiftkernel/weights.hpp"

namespace shiftkernel {

/// Covariate-shift learning data: labeled source sample (Xs, Y), unlabeled
/// target inputs Xt, and optionally the exact weights when they are known.
struct ShiftDataset {
  Matrix Xs;  // n x d
  Matrix Y;   // n x p, rows are outputs y_i
  Matrix Xt;  // m x d
  std::optional<Vector> beta;

  void validate() const {
    if (Xs.rows() < 1) throw std::invalid_argument("ShiftDataset: empty source");
    if (Y.rows() != Xs.rows())
      throw std::invalid_argument("ShiftDataset: Y row count != n");
    if (Xt.size() > 0 && Xt.cols() != Xs.cols())
      throw std::invalid_argument("ShiftDataset: Xt column count != d");
    if (beta && (beta->size() != Xs.rows() || (beta->array() < 0.0).any()))
      throw std::invalid_argument("ShiftDataset: invalid weight vector");
  }
};

/// Weighted spectral-filter predictor in precomputed form:
/// predict(x) = C * k_{x,n} with the p x n matrix
/// C = Y^T B^{1/2} (1/n) g_lambda((1/n) B^{1/2} K B^{1/2}) B^{1/2}.
struct FittedModel {
  KernelSpec kernel;
  FilterSpec filter;
  Matrix train_inputs;  // n x d
  Matrix coeff;         // p x n
  Vector beta;          // weights used at fit time

  Eigen::Index input_dim() const { return train_inputs.cols(); }
  Eigen::Index output_dim() const { return coeff.rows(); }

  Vector predict(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != train_inputs.cols())
      throw std::invalid_argument("predict: dimension mismatch");
    return coeff * cross_kernel_vector(kernel, train_inputs, x);
  }

  /// Row-wise predict; one GEMM over the cross-kernel block.
  Matrix predict_batch(const Eigen::Ref<const Matrix>& X) const {
    if (X.cols() != train_inputs.cols())
      throw std::invalid_argument("predict_batch: dimension mismatch");
    if (X.rows() == 0) return Matrix(0, coeff.rows());
    return (coeff * cross_kernel_matrix(kernel, train_inputs, X)).transpose();
  }
};

inline FittedModel fit(const ShiftDataset& ds, const KernelSpec& spec,
                       const FilterSpec& filter,
                       const Eigen::Ref<const Vector>& beta) {
  ds.validate();
  spec.validate();
  filter.validate();
  const Eigen::Index n = ds.Xs.rows();
  if (beta.size() != n)
    throw std::invalid_argument("fit: weight vector length != n");
  const Vector sqrt_b = sqrt_weights(beta);

  const Matrix K = gram(spec, ds.Xs);
  Matrix M = sqrt_b.asDiagonal() * K * sqrt_b.asDiagonal();
  M /= static_cast<double>(n);
  M = 0.5 * (M + M.transpose());  // absorb rounding asymmetry

  const Matrix G = apply_filter_matrix(filter, M);

  FittedModel model;
  model.kernel = spec;
  model.filter = filter;
  model.train_inputs = ds.Xs;
  model.beta = beta;
  model.coeff = (ds.Y.transpose() * sqrt_b.asDiagonal()) * G *
                sqrt_b.asDiagonal() / static_cast<double>(n);
  return model;
}

/// Importance-weighted empirical risk (1/n) sum_i beta_i ||f(x_i) - y_i||^2.
template <class Model>
double weighted_empirical_risk(const Model& model, const ShiftDataset& ds,
                               const Eigen::Ref<const Vector>& beta) {
  ds.validate();
  if (beta.size() != ds.Xs.rows())
    throw std::invalid_argument("weighted_empirical_risk: weight length != n");
  const Matrix pred = model.predict_batch(ds.Xs);
  if (pred.cols() != ds.Y.cols())
    throw std::invalid_argument(
        "weighted_empirical_risk: output dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ds.Xs.rows(); ++i)
    acc += beta(i) * (pred.row(i) - ds.Y.row(i)).squaredNorm();
  return acc / static_cast<double>(ds.Xs.rows());
}

}  // namespace shiftkernel
