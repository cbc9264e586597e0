// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#include "shiftkernel/kernels.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "test_util.hpp"

using namespace shiftkernel;
using Catch::Approx;
using testutil::random_matrix;

namespace {
const KernelSpec kGauss{KernelFamily::Gaussian, 0.01};
const KernelSpec kCauchy{KernelFamily::Cauchy, 5.0};
const KernelSpec kExp{KernelFamily::Exponential, 5.0};
const KernelSpec kImq{KernelFamily::IMQ, 5.0};

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("eval_kernel matches the closed forms") {
  const Vector x = vec2(0.0, 0.0);
  REQUIRE(eval_kernel(kGauss, x, x) == 1.0);

  // ||x - t||^2 = 100 with gamma = 0.01 -> exp(-1)
  REQUIRE(eval_kernel(kGauss, x, vec2(10.0, 0.0)) ==
          Approx(std::exp(-1.0)).epsilon(1e-15));

  REQUIRE(eval_kernel(kImq, x, x) == Approx(0.2).epsilon(1e-15));

  // Cauchy, ||x - t||^2 = 25, gamma = 5 -> 1/(1 + 1)
  REQUIRE(eval_kernel(kCauchy, x, vec2(5.0, 0.0)) == Approx(0.5).epsilon(1e-15));

  // Exponential uses the unsquared distance over gamma^2.
  REQUIRE(eval_kernel(kExp, x, vec2(5.0, 0.0)) ==
          Approx(std::exp(-5.0 / 25.0)).epsilon(1e-15));
}

TEST_CASE("eval_kernel rejects bad input") {
  const Vector x = vec2(0.0, 0.0);
  Vector t(3);
  t.setZero();
  REQUIRE_THROWS_AS(eval_kernel(kGauss, x, t), std::invalid_argument);
  Vector bad = vec2(std::nan(""), 0.0);
  REQUIRE_THROWS_AS(eval_kernel(kGauss, x, bad), std::invalid_argument);
  REQUIRE_THROWS_AS(eval_kernel(KernelSpec{KernelFamily::Gaussian, -1.0}, x, x),
                    std::invalid_argument);
}

TEST_CASE("kernel symmetry is exact") {
  testutil::Splitmix64 rng(11);
  for (const auto& spec : {kGauss, kCauchy, kExp, kImq})
    for (int trial = 0; trial < 50; ++trial) {
      const Vector x = testutil::random_vector(rng, 4, -3.0, 3.0);
      const Vector t = testutil::random_vector(rng, 4, -3.0, 3.0);
      REQUIRE(eval_kernel(spec, x, t) == eval_kernel(spec, t, x));
    }
}

TEST_CASE("diagonal is bounded by kappa^2 per family") {
  testutil::Splitmix64 rng(12);
  for (const auto& spec : {kGauss, kCauchy, kExp, kImq}) {
    const double kappa2 = spec.diagonal_value();
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = testutil::random_vector(rng, 3, -10.0, 10.0);
      REQUIRE(eval_kernel(spec, x, x) <= kappa2 + 1e-15);
    }
  }
}

TEST_CASE("gram examples") {
  Matrix one(1, 2);
  one << 0.3, -0.7;
  REQUIRE(gram(kGauss, one)(0, 0) == 1.0);

  Matrix twin(2, 2);
  twin << 0.5, 0.5, 0.5, 0.5;
  REQUIRE(gram(kGauss, twin).isApprox(Matrix::Ones(2, 2), 1e-15));

  const Matrix empty(0, 2);
  REQUIRE_THROWS_AS(gram(kGauss, empty), std::invalid_argument);
}

TEST_CASE("gram is PSD up to rounding for all families") {
  testutil::Splitmix64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(10));
    const int d = 1 + static_cast<int>(rng.next_below(4));
    const Matrix X = random_matrix(rng, n, d, -2.0, 2.0);
    for (const auto& spec : {kGauss, kCauchy, kExp, kImq}) {
      const Matrix K = gram(spec, X);
      REQUIRE((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Matrix> es(K);
      REQUIRE(es.eigenvalues().minCoeff() >= -1e-8 * n);
    }
  }
}

TEST_CASE("gram n=3 has nonnegative spectrum to 1e-10") {
  testutil::Splitmix64 rng(14);
  const Matrix X = random_matrix(rng, 3, 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram(kGauss, X));
  REQUIRE(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("cross_kernel_vector agrees with gram rows") {
  testutil::Splitmix64 rng(15);
  const Matrix X = random_matrix(rng, 6, 3);
  for (const auto& spec : {kGauss, kCauchy, kExp, kImq}) {
    const Matrix K = gram(spec, X);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const Vector k = cross_kernel_vector(spec, X, X.row(i).transpose());
      REQUIRE((k.transpose() - K.row(i)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("cross_kernel_vector examples") {
  Matrix X(2, 2);
  X << 0.0, 0.0, 3.0, 4.0;  // distances^2 to origin: 0 and 25
  const Vector k = cross_kernel_vector(kCauchy, X, vec2(0.0, 0.0));
  REQUIRE(k(0) == 1.0);
  REQUIRE(k(1) == Approx(0.5).epsilon(1e-15));

  Matrix one(1, 2);
  one << 1.0, 2.0;
  const Vector k1 = cross_kernel_vector(kGauss, one, vec2(0.5, 0.5));
  REQUIRE(k1(0) ==
          eval_kernel(kGauss, one.row(0).transpose(), vec2(0.5, 0.5)));

  Vector wrong(3);
  wrong.setZero();
  REQUIRE_THROWS_AS(cross_kernel_vector(kGauss, X, wrong),
                    std::invalid_argument);
}

TEST_CASE("expanded-distance fast path agrees with the exact path") {
  testutil::Splitmix64 rng(16);
  const Matrix X = random_matrix(rng, 8, 5);
  for (const auto& spec : {kGauss, kCauchy, kExp, kImq}) {
    const Matrix a = gram(spec, X);
    const Matrix b = gram_expanded(spec, X);
    REQUIRE((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}
