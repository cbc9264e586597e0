// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "shiftkernel/spectral.hpp"

namespace shiftkernel {

struct MetricReport {
  double mse = 0.0;
  double rel_err = 0.0;
  double psnr = 0.0;  // dB, peak = 1
  int n_items = 0;
};

/// Mean squared error over all entries.
inline double mse(const Eigen::Ref<const Matrix>& pred,
                  const Eigen::Ref<const Matrix>& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw std::invalid_argument("mse: shape mismatch");
  if (pred.size() == 0) throw std::invalid_argument("mse: empty input");
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

/// Mean over items (rows) of ||pred_i - truth_i|| / ||truth_i||.
inline double rel_err(const Eigen::Ref<const Matrix>& pred,
                      const Eigen::Ref<const Matrix>& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw std::invalid_argument("rel_err: shape mismatch");
  if (pred.rows() == 0) throw std::invalid_argument("rel_err: empty input");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    const double denom = truth.row(i).norm();
    if (denom == 0.0)
      throw std::invalid_argument("rel_err: zero-norm truth row " +
                                  std::to_string(i));
    acc += (pred.row(i) - truth.row(i)).norm() / denom;
  }
  return acc / static_cast<double>(pred.rows());
}

/// 10 log10(peak^2 / mse). Perfect reconstructions (mse = 0) are the
/// caller's business, not an infinity here.
inline double psnr(double mse_value, double peak = 1.0) {
  if (!(mse_value > 0.0))
    throw std::invalid_argument("psnr: infinite PSNR (mse must be > 0)");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be > 0");
  return 10.0 * std::log10(peak * peak / mse_value);
}

inline MetricReport metric_report(const Eigen::Ref<const Matrix>& pred,
                                  const Eigen::Ref<const Matrix>& truth) {
  MetricReport r;
  r.mse = mse(pred, truth);
  r.rel_err = rel_err(pred, truth);
  r.psnr = psnr(r.mse);
  r.n_items = static_cast<int>(pred.rows());
  return r;
}

/// Empirical effective dimension: sum_i w_i/(w_i + lambda) over the
/// eigenvalues w of K/n, clamping rounding-level negatives to zero.
inline double effective_dimension(const Eigen::Ref<const Matrix>& K,
                                  double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("effective_dimension: lambda must be > 0");
  const Eigen::Index n = K.rows();
  Matrix Kn = K / static_cast<double>(n);
  Kn = 0.5 * (Kn + Kn.transpose());
  const EigenPair ep = sym_eig(Kn);
  const double tol =
      1e-8 * std::max(Kn.trace(), 0.0) / static_cast<double>(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = ep.values(i);
    if (w < -tol)
      throw std::runtime_error("effective_dimension: matrix not PSD");
    if (w < 0.0) w = 0.0;
    acc += w / (w + lambda);
  }
  return acc;
}

/// Least-squares slope of log(error) against log(n).
inline double rate_slope(const std::vector<int>& ns,
                         const std::vector<double>& errors) {
  if (ns.size() < 3)
    throw std::invalid_argument("rate_slope: need at least 3 points");
  if (ns.size() != errors.size())
    throw std::invalid_argument("rate_slope: length mismatch");
  for (std::size_t i = 0; i + 1 < ns.size(); ++i)
    if (ns[i + 1] <= ns[i])
      throw std::invalid_argument("rate_slope: ns must be strictly increasing");
  for (double e : errors)
    if (!(e > 0.0))
      throw std::invalid_argument("rate_slope: errors must be positive");

  const std::size_t k = ns.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  return (k * sxy - sx * sy) / denom;
}

}  // namespace shiftkernel
