/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSIM_LOSS_MODEL_HPP_
#define FEDSIM_LOSS_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "fedsim/dataset.hpp"
#include "fedsim/param_vector.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

enum class ModelKind { kQuadratic, kLogistic, kTinyMlp };

std::string_view to_string(ModelKind kind);

struct Optimum {
  ParamVector point;
  double value = 0.0;
};

// A client's objective F_i. Loss and gradient evaluation are const and safe
// to call concurrently.
class LossModel {
 public:
  virtual ~LossModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t sample_count() const = 0;

  // Full-dataset loss F_i(w). Throws ConfigError on dimension mismatch.
  virtual double loss(const ParamVector& w) const = 0;

  // Mean per-sample gradient over `batch`. Throws UsageError on an empty
  // batch. `noise` feeds models with stochastic samples; when null the
  // model returns the expectation over that noise.
  virtual ParamVector gradient(const ParamVector& w,
                               std::span<const std::size_t> batch,
                               Rng* noise = nullptr) const = 0;

  // Noise-free gradient over every sample.
  ParamVector full_gradient(const ParamVector& w) const;

  // Strong convexity and smoothness constants when the model can state
  // them. Absent for non-convex kinds.
  virtual std::optional<double> strong_convexity() const { return {}; }
  virtual std::optional<double> smoothness() const { return {}; }

  // Exact optimum, when available in closed form.
  virtual std::optional<Optimum> analytic_optimum() const { return {}; }
};

// F_i(w) = (a/2) ||w - c||^2 over n identical virtual samples. With
// jitter_variance v > 0 each sample drawn during SGD sees the centre
// c + xi, xi ~ N(0, v I), so the stochastic gradient is unbiased with
// variance a^2 d v / b.
class QuadraticModel final : public LossModel {
 public:
  QuadraticModel(ParamVector center, double curvature,
                 std::size_t samples = 1, double jitter_variance = 0.0);

  ModelKind kind() const override { return ModelKind::kQuadratic; }
  std::size_t dim() const override { return center_.size(); }
  std::size_t sample_count() const override { return samples_; }

  double loss(const ParamVector& w) const override;
  ParamVector gradient(const ParamVector& w,
                       std::span<const std::size_t> batch,
                       Rng* noise = nullptr) const override;

  std::optional<double> strong_convexity() const override {
    return curvature_;
  }
  std::optional<double> smoothness() const override { return curvature_; }
  std::optional<Optimum> analytic_optimum() const override {
    return Optimum{center_, 0.0};
  }

  const ParamVector& center() const { return center_; }
  double curvature() const { return curvature_; }
  double jitter_variance() const { return jitter_variance_; }

  // E||g - grad F||^2 for a batch of b samples.
  double gradient_variance(std::size_t batch_size) const;

 private:
  ParamVector center_;
  double curvature_;
  std::size_t samples_;
  double jitter_variance_;
};

// Shared by the classifier kinds: owns the client's data and predicts labels.
class ClassifierModel : public LossModel {
 public:
  explicit ClassifierModel(LabeledDataset data);

  std::size_t sample_count() const override { return data_.size(); }
  const LabeledDataset& data() const { return data_; }

  virtual int predict(const ParamVector& w,
                      std::span<const double> features) const = 0;

  // Fraction of `ds` classified correctly.
  double accuracy(const ParamVector& w, const LabeledDataset& ds) const;

 protected:
  LabeledDataset data_;
};

// Multinomial logistic regression with an L2 penalty on every parameter.
// Layout: class-major weight rows (class_count x dim) followed by the
// class_count biases.
class LogisticModel final : public ClassifierModel {
 public:
  LogisticModel(LabeledDataset data, double ridge);

  ModelKind kind() const override { return ModelKind::kLogistic; }
  std::size_t dim() const override;

  double loss(const ParamVector& w) const override;
  ParamVector gradient(const ParamVector& w,
                       std::span<const std::size_t> batch,
                       Rng* noise = nullptr) const override;
  int predict(const ParamVector& w,
              std::span<const double> features) const override;

  std::optional<double> strong_convexity() const override { return ridge_; }
  // ridge + lambda_max(X^T X)/n on bias-augmented features, by 20 steps of
  // power iteration.
  std::optional<double> smoothness() const override { return smoothness_; }

  double ridge() const { return ridge_; }

 private:
  double ridge_;
  double smoothness_;
};

// One tanh hidden layer, softmax output. Parameter layout: W1 (hidden x in),
// b1, W2 (classes x hidden), b2.
class TinyMlpModel final : public ClassifierModel {
 public:
  TinyMlpModel(LabeledDataset data, std::size_t hidden, double ridge = 0.0);

  ModelKind kind() const override { return ModelKind::kTinyMlp; }
  std::size_t dim() const override;

  double loss(const ParamVector& w) const override;
  ParamVector gradient(const ParamVector& w,
                       std::span<const std::size_t> batch,
                       Rng* noise = nullptr) const override;
  int predict(const ParamVector& w,
              std::span<const double> features) const override;

  std::size_t hidden() const { return hidden_; }

  // Symmetric uniform init, bound 1/sqrt(fan_in) per layer.
  ParamVector initial_params(std::uint64_t seed) const;

 private:
  std::size_t hidden_;
  double ridge_;
};

// Parameter count for the classifier layouts above.
std::size_t logistic_dim(std::size_t features, int classes);
std::size_t mlp_dim(std::size_t features, std::size_t hidden, int classes);

// Largest eigenvalue of (1/n) X~^T X~ where X~ is X with a ones column.
double feature_gram_lambda_max(const LabeledDataset& ds, int iterations = 20);

struct MinimizeOptions {
  double tol = 1e-10;
  int max_iterations = 200000;
};

// Accelerated gradient descent with step 1/L and gradient-based restart,
// run until ||grad|| <= tol. Throws OracleError with the last gradient norm
// when max_iterations is exhausted.
Optimum minimize_smooth(
    const std::function<double(const ParamVector&)>& f,
    const std::function<ParamVector(const ParamVector&)>& grad,
    ParamVector start, double smoothness, const MinimizeOptions& options);

// (w_i*, F_i*): exact for quadratics, the minimizer oracle for logistic
// models, nullopt ("unknown") for the tiny MLP.
std::optional<Optimum> local_optimum(const LossModel& model,
                                     const MinimizeOptions& options = {});

}  // namespace fedsim

#endif  // FEDSIM_LOSS_MODEL_HPP_
