// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shiftkernel/estimator.hpp"
#include "shiftkernel/model.hpp"
#include "shiftkernel/spectral.hpp"

namespace shiftkernel {

inline constexpr double kDefaultCondThreshold = 1e8;

/// Linear combination sum_j c_j f_j over the retained member subset.
class AggregateModel {
 public:
  AggregateModel(std::vector<AnyModel> members, Vector coeffs,
                 std::vector<int> kept, double cond)
      : members_(std::move(members)),
        coeffs_(std::move(coeffs)),
        kept_(std::move(kept)),
        cond_(cond) {
    if (static_cast<Eigen::Index>(kept_.size()) != coeffs_.size())
      throw std::invalid_argument("AggregateModel: |coeffs| != |kept|");
    if (kept_.size() > members_.size())
      throw std::invalid_argument("AggregateModel: kept exceeds members");
  }

  const std::vector<AnyModel>& members() const { return members_; }
  const Vector& coeffs() const { return coeffs_; }
  const std::vector<int>& kept() const { return kept_; }
  double cond() const { return cond_; }

  Eigen::Index input_dim() const { return members_.front().input_dim(); }
  Eigen::Index output_dim() const { return members_.front().output_dim(); }

  Vector predict(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != input_dim())
      throw std::invalid_argument("AggregateModel: dimension mismatch");
    Vector out = Vector::Zero(output_dim());
    for (std::size_t j = 0; j < kept_.size(); ++j)
      out += coeffs_(static_cast<Eigen::Index>(j)) *
             members_[static_cast<std::size_t>(kept_[j])].predict(x);
    return out;
  }

  Matrix predict_batch(const Eigen::Ref<const Matrix>& X) const {
    Matrix out = Matrix::Zero(X.rows(), output_dim());
    for (std::size_t j = 0; j < kept_.size(); ++j)
      out += coeffs_(static_cast<Eigen::Index>(j)) *
             members_[static_cast<std::size_t>(kept_[j])].predict_batch(X);
    return out;
  }

 private:
  std::vector<AnyModel> members_;
  Vector coeffs_;
  std::vector<int> kept_;
  double cond_;
};

inline Vector aggregate_predict(const AggregateModel& am,
                                const Eigen::Ref<const Vector>& x) {
  return am.predict(x);
}

/// Empirical aggregation system: G(j,k) = (1/n) sum_i beta_i <f_j(x_i), f_k(x_i)>
/// and g(j) = (1/n) sum_i beta_i <y_i, f_j(x_i)>. Only the upper half is
/// computed and mirrored, so G is exactly symmetric.
inline std::pair<Matrix, Vector> build_system(
    const std::vector<AnyModel>& models, const ShiftDataset& ds,
    const Eigen::Ref<const Vector>& beta) {
  ds.validate();
  if (models.empty()) throw std::invalid_argument("build_system: no models");
  const Eigen::Index n = ds.Xs.rows();
  if (beta.size() != n)
    throw std::invalid_argument("build_system: weight length != n");
  const Eigen::Index l = static_cast<Eigen::Index>(models.size());
  const Eigen::Index p = ds.Y.cols();
  for (const auto& m : models)
    if (m.input_dim() != ds.Xs.cols() || m.output_dim() != p)
      throw std::invalid_argument("build_system: member dimension mismatch");

  // Weighted member evaluations W_j = diag(sqrt(beta)) f_j(Xs).
  const Vector sqrt_b = sqrt_weights(beta);
  std::vector<Matrix> W;
  W.reserve(static_cast<std::size_t>(l));
  for (const auto& m : models)
    W.push_back(sqrt_b.asDiagonal() * m.predict_batch(ds.Xs));
  const Matrix Wy = sqrt_b.asDiagonal() * ds.Y;

  Matrix G(l, l);
  Vector g(l);
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index k = j; k < l; ++k) {
      const double v = W[static_cast<std::size_t>(j)]
                           .cwiseProduct(W[static_cast<std::size_t>(k)])
                           .sum() /
                       static_cast<double>(n);
      G(j, k) = v;
      G(k, j) = v;
    }
    g(j) = Wy.cwiseProduct(W[static_cast<std::size_t>(j)]).sum() /
           static_cast<double>(n);
  }
  return {G, g};
}

namespace detail {

inline double sym_cond_number(const Eigen::Ref<const Matrix>& G) {
  const Vector w = sym_eig(G).values.cwiseAbs();
  const double lo = w.minCoeff();
  const double hi = w.maxCoeff();
  if (hi == 0.0) return std::numeric_limits<double>::infinity();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

inline Matrix submatrix(const Eigen::Ref<const Matrix>& G,
                        const std::vector<int>& idx) {
  Matrix S(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      S(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          G(idx[a], idx[b]);
  return S;
}

}  // namespace detail

struct AggregationSolution {
  Vector coeffs;
  std::vector<int> kept;
  double cond = 0.0;
};

/// Solve G c = g after withdrawing ill-conditioned members: while the kept
/// submatrix's condition number exceeds the threshold, drop the member whose
/// removal shrinks it the most (ties to the lowest index).
inline AggregationSolution solve_aggregation(
    const Eigen::Ref<const Matrix>& G, const Eigen::Ref<const Vector>& g,
    double cond_threshold = kDefaultCondThreshold) {
  const Eigen::Index l = G.rows();
  if (l < 1 || G.cols() != l || g.size() != l)
    throw std::invalid_argument("solve_aggregation: bad system shape");

  std::vector<int> kept(static_cast<std::size_t>(l));
  std::iota(kept.begin(), kept.end(), 0);
  double cond = detail::sym_cond_number(G);
  while (cond > cond_threshold) {
    if (kept.size() == 1)
      throw std::runtime_error("solve_aggregation: aggregation degenerate");
    std::size_t drop = 0;
    double best_cond = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < kept.size(); ++r) {
      std::vector<int> trial = kept;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(r));
      const double c = detail::sym_cond_number(detail::submatrix(G, trial));
      if (c < best_cond) {
        best_cond = c;
        drop = r;
      }
    }
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(drop));
    cond = best_cond;
  }

  const Matrix Gk = detail::submatrix(G, kept);
  Vector gk(kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a)
    gk(static_cast<Eigen::Index>(a)) = g(kept[a]);

  AggregationSolution sol;
  sol.coeffs = Gk.ldlt().solve(gk);
  sol.kept = kept;
  sol.cond = cond;
  return sol;
}

/// Aggregate a member list against the weighted source data.
inline AggregateModel aggregate(std::vector<AnyModel> members,
                                const ShiftDataset& ds,
                                const Eigen::Ref<const Vector>& beta,
                                double cond_threshold = kDefaultCondThreshold) {
  auto [G, g] = build_system(members, ds, beta);
  AggregationSolution sol = solve_aggregation(G, g, cond_threshold);
  return AggregateModel(std::move(members), sol.coeffs, sol.kept, sol.cond);
}

/// Two-level multiple kernel learning: per kernel, aggregate fits across the
/// lambda grid; then aggregate the per-kernel aggregates.
inline AggregateModel multi_kernel_learn(
    const ShiftDataset& ds, const std::vector<KernelSpec>& kernel_specs,
    const std::vector<double>& lambda_grid, const FilterSpec& filter,
    const Eigen::Ref<const Vector>& beta,
    double cond_threshold = kDefaultCondThreshold) {
  if (kernel_specs.empty())
    throw std::invalid_argument("multi_kernel_learn: no kernels");
  if (lambda_grid.empty())
    throw std::invalid_argument("multi_kernel_learn: empty lambda grid");

  std::vector<AnyModel> per_kernel;
  per_kernel.reserve(kernel_specs.size());
  for (const auto& spec : kernel_specs) {
    std::vector<AnyModel> fits;
    fits.reserve(lambda_grid.size());
    for (double lambda : lambda_grid)
      fits.emplace_back(fit(ds, spec, filter.with_lambda(lambda), beta));
    per_kernel.emplace_back(
        aggregate(std::move(fits), ds, beta, cond_threshold));
  }
  return aggregate(std::move(per_kernel), ds, beta, cond_threshold);
}

}  // namespace shiftkernel
