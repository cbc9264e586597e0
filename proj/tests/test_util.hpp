// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "shiftkernel/detail/rng.hpp"

namespace testutil {

using shiftkernel::detail::Splitmix64;

inline Eigen::MatrixXd random_matrix(Splitmix64& rng, Eigen::Index rows,
                                     Eigen::Index cols, double lo = -1.0,
                                     double hi = 1.0) {
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      M(i, j) = lo + (hi - lo) * rng.next_double();
  return M;
}

inline Eigen::VectorXd random_vector(Splitmix64& rng, Eigen::Index n,
                                     double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = lo + (hi - lo) * rng.next_double();
  return v;
}

inline Eigen::MatrixXd random_psd(Splitmix64& rng, Eigen::Index n) {
  const Eigen::MatrixXd A = random_matrix(rng, n, n);
  return A * A.transpose() / static_cast<double>(n);
}

inline Eigen::MatrixXd random_orthogonal(Splitmix64& rng, Eigen::Index n) {
  const Eigen::MatrixXd A = random_matrix(rng, n, n);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
}

// Points on a jittered grid in [0,1]^2 with guaranteed pairwise separation;
// keeps Gram matrices comfortably nonsingular for interpolation tests.
inline Eigen::MatrixXd separated_points(Splitmix64& rng, int n) {
  const int side = static_cast<int>(std::ceil(std::sqrt(double(n))));
  Eigen::MatrixXd X(n, 2);
  for (int i = 0; i < n; ++i) {
    const int gx = i % side;
    const int gy = i / side;
    X(i, 0) = (gx + 0.2 + 0.6 * rng.next_double()) / side;
    X(i, 1) = (gy + 0.2 + 0.6 * rng.next_double()) / side;
  }
  return X;
}

}  // namespace testutil
