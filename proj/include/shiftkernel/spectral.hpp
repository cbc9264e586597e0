// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "shiftkernel/kernels.hpp"

namespace shiftkernel {

enum class FilterFamily { Tikhonov, IteratedTikhonov, SpectralCutoff };

inline const char* to_string(FilterFamily f) {
  switch (f) {
    case FilterFamily::Tikhonov: return "tikhonov";
    case FilterFamily::IteratedTikhonov: return "iterated_tikhonov";
    case FilterFamily::SpectralCutoff: return "cutoff";
  }
  return "?";
}

/// One member g_lambda of a regularization family. The iteration count m is
/// only meaningful for IteratedTikhonov (m = 1 reduces it to Tikhonov).
struct FilterSpec {
  FilterFamily family = FilterFamily::Tikhonov;
  double lambda = 1e-3;
  int m = 1;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw std::invalid_argument("FilterSpec: lambda must be positive, got " +
                                  std::to_string(lambda));
    if (family == FilterFamily::IteratedTikhonov && m < 1)
      throw std::invalid_argument("FilterSpec: iterated Tikhonov needs m >= 1");
  }

  FilterSpec with_lambda(double l) const {
    FilterSpec f = *this;
    f.lambda = l;
    return f;
  }
};

/// Eigendecomposition M = V diag(values) V^T with eigenvalues descending.
struct EigenPair {
  Vector values;
  Matrix vectors;
};

/// Dense symmetric eigendecomposition, descending eigenvalue order.
/// Rejects inputs that are asymmetric beyond 1e-10 relative tolerance.
inline EigenPair sym_eig(const Eigen::Ref<const Matrix>& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("sym_eig: matrix not square");
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1e-300))
    throw std::invalid_argument("sym_eig: input asymmetric (max deviation " +
                                std::to_string(asym) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eig: eigensolver did not converge");
  // Eigen returns ascending order; flip to descending.
  EigenPair out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

/// g_lambda(sigma). Iterated Tikhonov uses the telescoped form
/// (1 + t + ... + t^{m-1})/(sigma + lambda) with t = lambda/(sigma + lambda),
/// which is exact and finite at sigma = 0.
inline double filter_value(const FilterSpec& f, double sigma) {
  f.validate();
  if (!(sigma >= 0.0))
    throw std::invalid_argument("filter_value: negative sigma");
  switch (f.family) {
    case FilterFamily::Tikhonov:
      return 1.0 / (sigma + f.lambda);
    case FilterFamily::IteratedTikhonov: {
      const double t = f.lambda / (sigma + f.lambda);
      double geom = 1.0;
      double tk = 1.0;
      for (int k = 1; k < f.m; ++k) {
        tk *= t;
        geom += tk;
      }
      return geom / (sigma + f.lambda);
    }
    case FilterFamily::SpectralCutoff:
      return sigma >= f.lambda ? 1.0 / sigma : 0.0;
  }
  throw std::logic_error("unreachable filter family");
}

/// Residual 1 - sigma * g_lambda(sigma).
inline double residual_value(const FilterSpec& f, double sigma) {
  f.validate();
  if (!(sigma >= 0.0))
    throw std::invalid_argument("residual_value: negative sigma");
  switch (f.family) {
    case FilterFamily::Tikhonov:
      return f.lambda / (sigma + f.lambda);
    case FilterFamily::IteratedTikhonov:
      return std::pow(f.lambda / (sigma + f.lambda), f.m);
    case FilterFamily::SpectralCutoff:
      return sigma >= f.lambda ? 0.0 : 1.0;
  }
  throw std::logic_error("unreachable filter family");
}

/// g_lambda applied to a symmetric PSD matrix through its eigensystem.
/// Eigenvalues in [-tol, 0) with tol = 1e-8*trace/n are rounding noise and
/// are clamped to 0; anything lower is rejected as not PSD.
inline Matrix apply_filter_matrix(const FilterSpec& f,
                                  const Eigen::Ref<const Matrix>& M) {
  f.validate();
  const Eigen::Index n = M.rows();
  EigenPair ep = sym_eig(M);
  const double tol = 1e-8 * std::max(M.trace(), 0.0) / static_cast<double>(n);
  Vector g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = ep.values(i);
    if (w < -tol)
      throw std::runtime_error(
          "apply_filter_matrix: matrix not PSD (eigenvalue " +
          std::to_string(w) + " below clamp tolerance " + std::to_string(-tol) +
          ")");
    if (w < 0.0) w = 0.0;
    g(i) = filter_value(f, w);
  }
  Matrix out = ep.vectors * g.asDiagonal() * ep.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

/// Direct solve (M + lambda I)^{-1}; the Tikhonov cross-check route.
inline Matrix tikhonov_direct(double lambda, const Eigen::Ref<const Matrix>& M) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("tikhonov_direct: lambda must be positive");
  Matrix A = M;
  A.diagonal().array() += lambda;
  return A.ldlt().solve(Matrix::Identity(M.rows(), M.cols()));
}

}  // namespace shiftkernel
