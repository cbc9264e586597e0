// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "shiftkernel/kernels.hpp"

namespace shiftkernel {

/// Type-erased predictor so aggregation can mix fitted models, nested
/// aggregates and closed-form reference functions.
class AnyModel {
  struct Concept {
    virtual ~Concept() = default;
    virtual Vector predict(const Eigen::Ref<const Vector>& x) const = 0;
    virtual Matrix predict_batch(const Eigen::Ref<const Matrix>& X) const = 0;
    virtual Eigen::Index input_dim() const = 0;
    virtual Eigen::Index output_dim() const = 0;
  };

  template <class T>
  struct Holder final : Concept {
    explicit Holder(T m) : model(std::move(m)) {}
    Vector predict(const Eigen::Ref<const Vector>& x) const override {
      return model.predict(x);
    }
    Matrix predict_batch(const Eigen::Ref<const Matrix>& X) const override {
      return model.predict_batch(X);
    }
    Eigen::Index input_dim() const override { return model.input_dim(); }
    Eigen::Index output_dim() const override { return model.output_dim(); }
    T model;
  };

 public:
  template <class T>
  AnyModel(T model)  // NOLINT: implicit wrap is the point
      : impl_(std::make_shared<Holder<T>>(std::move(model))) {}

  Vector predict(const Eigen::Ref<const Vector>& x) const {
    return impl_->predict(x);
  }
  Matrix predict_batch(const Eigen::Ref<const Matrix>& X) const {
    return impl_->predict_batch(X);
  }
  Eigen::Index input_dim() const { return impl_->input_dim(); }
  Eigen::Index output_dim() const { return impl_->output_dim(); }

 private:
  std::shared_ptr<const Concept> impl_;
};

/// Wraps a plain function x -> y as a model (reference predictors in tests,
/// exact regression functions, baselines).
class FunctionModel {
 public:
  FunctionModel(Eigen::Index input_dim, Eigen::Index output_dim,
                std::function<Vector(const Vector&)> fn)
      : d_(input_dim), p_(output_dim), fn_(std::move(fn)) {}

  Vector predict(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != d_)
      throw std::invalid_argument("FunctionModel: dimension mismatch");
    return fn_(x);
  }
  Matrix predict_batch(const Eigen::Ref<const Matrix>& X) const {
    Matrix out(X.rows(), p_);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out.row(i) = predict(X.row(i).transpose()).transpose();
    return out;
  }
  Eigen::Index input_dim() const { return d_; }
  Eigen::Index output_dim() const { return p_; }

 private:
  Eigen::Index d_;
  Eigen::Index p_;
  std::function<Vector(const Vector&)> fn_;
};

}  // namespace shiftkernel
