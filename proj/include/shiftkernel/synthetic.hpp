// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "shiftkernel/detail/rng.hpp"
#include "shiftkernel/estimator.hpp"
#include "shiftkernel/kernels.hpp"
#include "shiftkernel/model.hpp"

namespace shiftkernel {

/// Covariate-shift test bed with everything known in closed form.
///
/// Inputs live on [0,1]^d. The source density is uniform; the target density
/// reweights the two halves {x_1 < 1/2} and {x_1 >= 1/2} by shift_strength,
/// so the density ratio is piecewise constant, bounded, and integrates to one
/// under the source. The regression function is a finite kernel expansion
/// (Gaussian sections, fixed anchors), hence inside the hypothesis space of
/// the matching kernel.
struct SyntheticProblem {
  std::uint64_t seed = 0;
  int d = 1;
  int p = 1;
  double shift_strength = 0.0;
  double noise_sd = 0.0;

  double target_weight_lo = 0.5;  // q-mass of {x_1 < 1/2}
  double target_weight_hi = 0.5;

  KernelSpec generator_kernel{KernelFamily::Gaussian, 1.0};
  Matrix anchors;     // J x d
  Vector amplitudes;  // J
  Matrix loadings;    // J x p, unit rows

  double beta_exact(const Eigen::Ref<const Vector>& x) const {
    return x(0) < 0.5 ? 2.0 * target_weight_lo : 2.0 * target_weight_hi;
  }

  double ratio_bound() const {
    return 2.0 * std::max(target_weight_lo, target_weight_hi);
  }

  Vector fstar(const Eigen::Ref<const Vector>& x) const {
    Vector out = Vector::Zero(p);
    for (Eigen::Index j = 0; j < anchors.rows(); ++j)
      out += amplitudes(j) *
             eval_kernel(generator_kernel, anchors.row(j).transpose(), x) *
             loadings.row(j).transpose();
    return out;
  }

  AnyModel fstar_model() const {
    SyntheticProblem copy = *this;
    return FunctionModel(d, p,
                         [copy](const Vector& x) { return copy.fstar(x); });
  }

  Vector sample_source(std::uint64_t index) const {
    auto rng = detail::stream_rng(seed, kSourceStream + index);
    Vector x(d);
    for (int k = 0; k < d; ++k) x(k) = rng.next_double();
    return x;
  }

  Vector sample_target(std::uint64_t index) const {
    auto rng = detail::stream_rng(seed, kTargetStream + index);
    const bool lower = rng.next_double() < target_weight_lo;
    Vector x(d);
    x(0) = 0.5 * rng.next_double() + (lower ? 0.0 : 0.5);
    for (int k = 1; k < d; ++k) x(k) = rng.next_double();
    return x;
  }

  // Truncated-Gaussian output noise, ||noise|| <= 3 * noise_sd * sqrt(p).
  Vector sample_noise(std::uint64_t index) const {
    Vector noise(p);
    if (noise_sd == 0.0) return Vector::Zero(p);
    auto rng = detail::stream_rng(seed, kNoiseStream + index);
    for (int k = 0; k < p; ++k) noise(k) = noise_sd * rng.next_normal();
    const double cap = 3.0 * noise_sd * std::sqrt(static_cast<double>(p));
    const double norm = noise.norm();
    if (norm > cap) noise *= cap / norm;
    return noise;
  }

  static constexpr std::uint64_t kAnchorStream = 1ULL << 32;
  static constexpr std::uint64_t kSourceStream = 2ULL << 32;
  static constexpr std::uint64_t kTargetStream = 3ULL << 32;
  static constexpr std::uint64_t kNoiseStream = 4ULL << 32;
  static constexpr std::uint64_t kMonteCarloStream = 5ULL << 32;
};

inline std::pair<SyntheticProblem, ShiftDataset> make_problem(
    std::uint64_t seed, int n, int m, int d, int p, double shift_strength,
    double noise_sd, int n_anchors = 10) {
  if (n < 1 || m < 1 || d < 1 || p < 1 || n_anchors < 1)
    throw std::invalid_argument("make_problem: invalid dimensions");
  if (shift_strength < 0.0 || shift_strength > 1.0)
    throw std::invalid_argument("make_problem: shift_strength outside [0,1]");
  if (noise_sd < 0.0)
    throw std::invalid_argument("make_problem: negative noise_sd");

  SyntheticProblem prob;
  prob.seed = seed;
  prob.d = d;
  prob.p = p;
  prob.shift_strength = shift_strength;
  prob.noise_sd = noise_sd;
  prob.target_weight_lo = 0.5 - 0.3 * shift_strength;
  prob.target_weight_hi = 0.5 + 0.3 * shift_strength;

  auto rng = detail::stream_rng(seed, SyntheticProblem::kAnchorStream);
  prob.anchors.resize(n_anchors, d);
  prob.amplitudes.resize(n_anchors);
  prob.loadings.resize(n_anchors, p);
  for (int j = 0; j < n_anchors; ++j) {
    for (int k = 0; k < d; ++k) prob.anchors(j, k) = rng.next_double();
    prob.amplitudes(j) = 2.0 * rng.next_double() - 1.0;
    for (int k = 0; k < p; ++k) prob.loadings(j, k) = rng.next_normal();
    prob.loadings.row(j).normalize();
  }

  ShiftDataset ds;
  ds.Xs.resize(n, d);
  ds.Y.resize(n, p);
  ds.Xt.resize(m, d);
  Vector beta(n);
  for (int i = 0; i < n; ++i) {
    const Vector x = prob.sample_source(static_cast<std::uint64_t>(i));
    ds.Xs.row(i) = x.transpose();
    ds.Y.row(i) = (prob.fstar(x) +
                   prob.sample_noise(static_cast<std::uint64_t>(i)))
                      .transpose();
    beta(i) = prob.beta_exact(x);
  }
  for (int j = 0; j < m; ++j)
    ds.Xt.row(j) = prob.sample_target(static_cast<std::uint64_t>(j)).transpose();
  ds.beta = beta;
  return {std::move(prob), std::move(ds)};
}

/// Monte-Carlo estimate of ||predictor - fstar||_{L2(q_X, Y)}.
inline double l2_target_error(const AnyModel& predictor,
                              const SyntheticProblem& prob, int n_mc,
                              std::uint64_t seed) {
  if (n_mc < 1) throw std::invalid_argument("l2_target_error: n_mc < 1");
  double acc = 0.0;
  for (int k = 0; k < n_mc; ++k) {
    auto rng = detail::stream_rng(
        seed, SyntheticProblem::kMonteCarloStream + static_cast<std::uint64_t>(k));
    const bool lower = rng.next_double() < prob.target_weight_lo;
    Vector x(prob.d);
    x(0) = 0.5 * rng.next_double() + (lower ? 0.0 : 0.5);
    for (int j = 1; j < prob.d; ++j) x(j) = rng.next_double();
    acc += (predictor.predict(x) - prob.fstar(x)).squaredNorm();
  }
  return std::sqrt(acc / static_cast<double>(n_mc));
}

}  // namespace shiftkernel
