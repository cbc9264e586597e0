// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#include "shiftkernel/synthetic.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "shiftkernel/estimator.hpp"
#include "test_util.hpp"

using namespace shiftkernel;
using Catch::Approx;

TEST_CASE("same seed gives bit-identical datasets") {
  auto [p1, d1] = make_problem(42, 50, 40, 3, 2, 0.7, 0.1);
  auto [p2, d2] = make_problem(42, 50, 40, 3, 2, 0.7, 0.1);
  REQUIRE((d1.Xs - d2.Xs).norm() == 0.0);
  REQUIRE((d1.Y - d2.Y).norm() == 0.0);
  REQUIRE((d1.Xt - d2.Xt).norm() == 0.0);
  REQUIRE((*d1.beta - *d2.beta).norm() == 0.0);

  auto [p3, d3] = make_problem(43, 50, 40, 3, 2, 0.7, 0.1);
  REQUIRE((d1.Xs - d3.Xs).norm() > 0.0);
}

TEST_CASE("zero shift means unit weights") {
  auto [prob, ds] = make_problem(1, 30, 30, 2, 2, 0.0, 0.0);
  REQUIRE((ds.beta->array() == 1.0).all());
  testutil::Splitmix64 rng(91);
  for (int trial = 0; trial < 20; ++trial)
    REQUIRE(prob.beta_exact(testutil::random_vector(rng, 2, 0.0, 1.0)) == 1.0);
}

TEST_CASE("zero noise reproduces the regression function exactly") {
  auto [prob, ds] = make_problem(2, 25, 10, 2, 3, 0.5, 0.0);
  for (int i = 0; i < 25; ++i)
    REQUIRE((ds.Y.row(i).transpose() - prob.fstar(ds.Xs.row(i).transpose()))
                .norm() == 0.0);
}

TEST_CASE("weights stay within the stated ratio bound") {
  auto [prob, ds] = make_problem(3, 200, 200, 2, 2, 1.0, 0.05);
  REQUIRE(prob.ratio_bound() == Approx(1.6));
  REQUIRE((ds.beta->array() >= 0.0).all());
  REQUIRE((ds.beta->array() <= prob.ratio_bound() + 1e-12).all());
}

TEST_CASE("the ratio integrates to one under the source") {
  auto [prob, ds] = make_problem(4, 10, 10, 2, 2, 0.8, 0.0);
  const int n_mc = 40000;
  double sum = 0.0, sumsq = 0.0;
  SyntheticProblem sampler = prob;
  sampler.seed = 990;
  for (int i = 0; i < n_mc; ++i) {
    const double b =
        prob.beta_exact(sampler.sample_source(static_cast<std::uint64_t>(i)));
    sum += b;
    sumsq += b * b;
  }
  const double mean = sum / n_mc;
  const double se =
      std::sqrt((sumsq / n_mc - mean * mean) / static_cast<double>(n_mc));
  REQUIRE(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("change of measure: E_p[beta loss] matches E_q[loss]") {
  auto [prob, ds] = make_problem(5, 10, 10, 2, 2, 0.6, 0.0);
  auto loss = [&](const Vector& x) { return prob.fstar(x).squaredNorm(); };

  SyntheticProblem sampler = prob;
  sampler.seed = 991;
  const int n_mc = 30000;
  double sp = 0, spp = 0, sq = 0, sqq = 0;
  for (int i = 0; i < n_mc; ++i) {
    const Vector xs = sampler.sample_source(static_cast<std::uint64_t>(i));
    const double lp = prob.beta_exact(xs) * loss(xs);
    sp += lp;
    spp += lp * lp;
    const Vector xt = sampler.sample_target(static_cast<std::uint64_t>(i));
    const double lq = loss(xt);
    sq += lq;
    sqq += lq * lq;
  }
  const double mp = sp / n_mc, mq = sq / n_mc;
  const double var_p = spp / n_mc - mp * mp;
  const double var_q = sqq / n_mc - mq * mq;
  const double se = std::sqrt((var_p + var_q) / n_mc);
  REQUIRE(std::abs(mp - mq) <= 3.0 * se);
}

TEST_CASE("l2_target_error is zero for the regression function itself") {
  auto [prob, ds] = make_problem(6, 10, 10, 2, 3, 0.5, 0.0);
  REQUIRE(l2_target_error(prob.fstar_model(), prob, 500, 77) < 1e-12);
}

TEST_CASE("l2_target_error of the zero predictor is MC-consistent") {
  auto [prob, ds] = make_problem(7, 10, 10, 2, 3, 0.4, 0.0);
  const FunctionModel zero(2, 3, [](const Vector&) { return Vector::Zero(3); });

  const int n_mc = 4000;
  const double a = l2_target_error(zero, prob, n_mc, 100);
  const double b = l2_target_error(zero, prob, n_mc, 200);

  // Standard error of the mean squared norm, from an independent draw.
  SyntheticProblem sampler = prob;
  sampler.seed = 992;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n_mc; ++i) {
    const double z =
        prob.fstar(sampler.sample_target(static_cast<std::uint64_t>(i)))
            .squaredNorm();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n_mc;
  const double var = sumsq / n_mc - mean * mean;
  const double se_sq = std::sqrt(2.0 * var / n_mc);  // pooled, two draws
  REQUIRE(std::abs(a * a - b * b) <= 3.0 * se_sq);
}

TEST_CASE("doubling the MC budget moves the estimate within noise") {
  auto [prob, ds] = make_problem(8, 10, 10, 2, 2, 0.5, 0.0);
  const FunctionModel zero(2, 2, [](const Vector&) { return Vector::Zero(2); });

  // Per-sample variance of the squared norm under q, estimated once.
  SyntheticProblem sampler = prob;
  sampler.seed = 993;
  const int probe = 20000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < probe; ++i) {
    const double z =
        prob.fstar(sampler.sample_target(static_cast<std::uint64_t>(i)))
            .squaredNorm();
    sum += z;
    sumsq += z * z;
  }
  const double var = sumsq / probe - (sum / probe) * (sum / probe);

  int hits = 0;
  const int n1 = 500, n2 = 1000;
  for (int rep = 0; rep < 100; ++rep) {
    const double e1 = l2_target_error(zero, prob, n1, 1000 + 2 * rep);
    const double e2 = l2_target_error(zero, prob, n2, 1001 + 2 * rep);
    const double se = std::sqrt(var / n1 + var / n2);
    if (std::abs(e1 * e1 - e2 * e2) <= 3.0 * se) ++hits;
  }
  REQUIRE(hits >= 95);
}

TEST_CASE("estimator error shrinks with the sample size") {
  const KernelSpec spec{KernelFamily::Gaussian, 1.0};
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    double errs[2];
    int idx = 0;
    for (int n : {100, 400}) {
      auto [prob, ds] = make_problem(seed, n, n, 2, 2, 0.5, 0.05);
      const FilterSpec filter{FilterFamily::Tikhonov,
                              std::pow(double(n), -2.0 / 3.0), 1};
      const FittedModel model = fit(ds, spec, filter, *ds.beta);
      errs[idx++] = l2_target_error(AnyModel(model), prob, 1000, 500 + seed);
    }
    if (errs[1] < errs[0]) ++improved;
  }
  REQUIRE(improved >= 4);
}

TEST_CASE("make_problem validates arguments") {
  REQUIRE_THROWS_AS(make_problem(0, 0, 5, 2, 2, 0.5, 0.1),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(make_problem(0, 5, 5, 2, 2, 1.5, 0.1),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(make_problem(0, 5, 5, 2, 2, 0.5, -0.1),
                    std::invalid_argument);
}
