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

#include "fedsim/loss_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "fedsim/errors.hpp"

namespace fedsim {
namespace {

void check_dim(const ParamVector& w, std::size_t expected) {
  if (w.size() != expected) {
    throw ConfigError("parameter dimension " + std::to_string(w.size()) +
                      " does not match model dimension " +
                      std::to_string(expected));
  }
}

void check_batch(std::span<const std::size_t> batch, std::size_t n) {
  if (batch.empty()) throw UsageError("gradient requested for an empty batch");
  for (std::size_t j : batch) {
    if (j >= n) {
      throw UsageError("batch index " + std::to_string(j) +
                       " out of range for " + std::to_string(n) + " samples");
    }
  }
}

// Softmax of `logits` in place; returns log-sum-exp.
double softmax_inplace(std::span<double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (double& z : logits) {
    z = std::exp(z - m);
    s += z;
  }
  for (double& z : logits) z /= s;
  return m + std::log(s);
}

// -log softmax(logits)[y]. log1p keeps tiny losses from rounding to zero.
double cross_entropy(std::span<const double> logits, std::size_t y) {
  const auto top = std::max_element(logits.begin(), logits.end());
  const double m = *top;
  double s = 0.0;
  for (auto it = logits.begin(); it != logits.end(); ++it) {
    if (it != top) s += std::exp(*it - m);
  }
  return (m - logits[y]) + std::log1p(s);
}

double ridge_term(const ParamVector& w, double ridge) {
  return ridge == 0.0 ? 0.0 : 0.5 * ridge * squared_norm(w);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kQuadratic:
      return "quadratic";
    case ModelKind::kLogistic:
      return "logistic";
    case ModelKind::kTinyMlp:
      return "tiny_mlp";
  }
  return "unknown";
}

ParamVector LossModel::full_gradient(const ParamVector& w) const {
  std::vector<std::size_t> all(sample_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return gradient(w, all, nullptr);
}

// ---------------------------------------------------------------------------
// Quadratic

QuadraticModel::QuadraticModel(ParamVector center, double curvature,
                               std::size_t samples, double jitter_variance)
    : center_(std::move(center)),
      curvature_(curvature),
      samples_(samples),
      jitter_variance_(jitter_variance) {
  if (center_.empty()) throw ConfigError("quadratic model needs dim >= 1");
  if (!(curvature_ > 0.0)) {
    throw ConfigError("quadratic curvature must be positive");
  }
  if (samples_ == 0) throw ConfigError("quadratic model needs >= 1 sample");
  if (jitter_variance_ < 0.0) {
    throw ConfigError("jitter variance must be nonnegative");
  }
}

double QuadraticModel::loss(const ParamVector& w) const {
  check_dim(w, dim());
  return 0.5 * curvature_ * squared_distance(w, center_);
}

ParamVector QuadraticModel::gradient(const ParamVector& w,
                                     std::span<const std::size_t> batch,
                                     Rng* noise) const {
  check_dim(w, dim());
  check_batch(batch, samples_);
  ParamVector g(dim());
  for (std::size_t k = 0; k < dim(); ++k) g[k] = curvature_ * (w[k] - center_[k]);
  if (jitter_variance_ > 0.0 && noise != nullptr) {
    std::normal_distribution<double> jitter(0.0, std::sqrt(jitter_variance_));
    const double scale = curvature_ / static_cast<double>(batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) {
      for (std::size_t k = 0; k < dim(); ++k) g[k] -= scale * jitter(*noise);
    }
  }
  return g;
}

double QuadraticModel::gradient_variance(std::size_t batch_size) const {
  return curvature_ * curvature_ * static_cast<double>(dim()) *
         jitter_variance_ / static_cast<double>(std::max<std::size_t>(1, batch_size));
}

// ---------------------------------------------------------------------------
// Classifiers

ClassifierModel::ClassifierModel(LabeledDataset data) : data_(std::move(data)) {
  if (data_.size() == 0) throw ConfigError("classifier has no local samples");
  if (data_.class_count < 2) {
    throw ConfigError("classifier needs at least two classes");
  }
}

double ClassifierModel::accuracy(const ParamVector& w,
                                 const LabeledDataset& ds) const {
  if (ds.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (predict(w, ds.sample(i)) == ds.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

std::size_t logistic_dim(std::size_t features, int classes) {
  return static_cast<std::size_t>(classes) * (features + 1);
}

std::size_t mlp_dim(std::size_t features, std::size_t hidden, int classes) {
  const auto c = static_cast<std::size_t>(classes);
  return hidden * features + hidden + c * hidden + c;
}

double feature_gram_lambda_max(const LabeledDataset& ds, int iterations) {
  const std::size_t d = ds.dim + 1;
  const double n = static_cast<double>(ds.size());
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> av(d);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    std::fill(av.begin(), av.end(), 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto x = ds.sample(i);
      double xv = v[d - 1];
      for (std::size_t k = 0; k + 1 < d; ++k) xv += x[k] * v[k];
      for (std::size_t k = 0; k + 1 < d; ++k) av[k] += x[k] * xv;
      av[d - 1] += xv;
    }
    double rayleigh = 0.0, norm2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      av[k] /= n;
      rayleigh += v[k] * av[k];
      norm2 += av[k] * av[k];
    }
    lambda = rayleigh;
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) return 0.0;
    for (std::size_t k = 0; k < d; ++k) v[k] = av[k] / norm;
  }
  return lambda;
}

LogisticModel::LogisticModel(LabeledDataset data, double ridge)
    : ClassifierModel(std::move(data)), ridge_(ridge) {
  if (ridge_ < 0.0) throw ConfigError("ridge must be nonnegative");
  smoothness_ = ridge_ + feature_gram_lambda_max(data_);
}

std::size_t LogisticModel::dim() const {
  return logistic_dim(data_.dim, data_.class_count);
}

double LogisticModel::loss(const ParamVector& w) const {
  check_dim(w, dim());
  const std::size_t d = data_.dim;
  const auto c = static_cast<std::size_t>(data_.class_count);
  const double* bias = w.data() + c * d;
  std::vector<double> logits(c);
  CompensatedSum total;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const auto x = data_.sample(i);
    for (std::size_t k = 0; k < c; ++k) {
      const double* row = w.data() + k * d;
      double z = bias[k];
      for (std::size_t f = 0; f < d; ++f) z += row[f] * x[f];
      logits[k] = z;
    }
    total.add(cross_entropy(logits, static_cast<std::size_t>(data_.labels[i])));
  }
  return total.value() / static_cast<double>(data_.size()) +
         ridge_term(w, ridge_);
}

ParamVector LogisticModel::gradient(const ParamVector& w,
                                    std::span<const std::size_t> batch,
                                    Rng* /*noise*/) const {
  check_dim(w, dim());
  check_batch(batch, data_.size());
  const std::size_t d = data_.dim;
  const auto c = static_cast<std::size_t>(data_.class_count);
  const double* bias = w.data() + c * d;
  ParamVector g(dim());
  double* gbias = g.data() + c * d;
  std::vector<double> prob(c);
  for (std::size_t j : batch) {
    const auto x = data_.sample(j);
    for (std::size_t k = 0; k < c; ++k) {
      const double* row = w.data() + k * d;
      double z = bias[k];
      for (std::size_t f = 0; f < d; ++f) z += row[f] * x[f];
      prob[k] = z;
    }
    softmax_inplace(prob);
    prob[static_cast<std::size_t>(data_.labels[j])] -= 1.0;
    for (std::size_t k = 0; k < c; ++k) {
      double* grow = g.data() + k * d;
      const double delta = prob[k];
      for (std::size_t f = 0; f < d; ++f) grow[f] += delta * x[f];
      gbias[k] += delta;
    }
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] = g[k] * inv_b + ridge_ * w[k];
  }
  return g;
}

int LogisticModel::predict(const ParamVector& w,
                           std::span<const double> features) const {
  const std::size_t d = data_.dim;
  const auto c = static_cast<std::size_t>(data_.class_count);
  int best = 0;
  double best_z = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c; ++k) {
    const double* row = w.data() + k * d;
    double z = w[c * d + k];
    for (std::size_t f = 0; f < d; ++f) z += row[f] * features[f];
    if (z > best_z) {
      best_z = z;
      best = static_cast<int>(k);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Tiny MLP

namespace {

struct MlpLayout {
  std::size_t in, hidden, out;
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hidden * in; }
  std::size_t w2() const { return b1() + hidden; }
  std::size_t b2() const { return w2() + out * hidden; }
};

// Forward pass for one sample; fills hidden activations and output logits.
void mlp_forward(const MlpLayout& l, const ParamVector& w,
                 std::span<const double> x, std::span<double> h,
                 std::span<double> z) {
  for (std::size_t u = 0; u < l.hidden; ++u) {
    const double* row = w.data() + l.w1() + u * l.in;
    double a = w[l.b1() + u];
    for (std::size_t f = 0; f < l.in; ++f) a += row[f] * x[f];
    h[u] = std::tanh(a);
  }
  for (std::size_t k = 0; k < l.out; ++k) {
    const double* row = w.data() + l.w2() + k * l.hidden;
    double a = w[l.b2() + k];
    for (std::size_t u = 0; u < l.hidden; ++u) a += row[u] * h[u];
    z[k] = a;
  }
}

}  // namespace

TinyMlpModel::TinyMlpModel(LabeledDataset data, std::size_t hidden,
                           double ridge)
    : ClassifierModel(std::move(data)), hidden_(hidden), ridge_(ridge) {
  if (hidden_ == 0) throw ConfigError("tiny_mlp needs at least one hidden unit");
  if (ridge_ < 0.0) throw ConfigError("ridge must be nonnegative");
}

std::size_t TinyMlpModel::dim() const {
  return mlp_dim(data_.dim, hidden_, data_.class_count);
}

double TinyMlpModel::loss(const ParamVector& w) const {
  check_dim(w, dim());
  const MlpLayout l{data_.dim, hidden_,
                    static_cast<std::size_t>(data_.class_count)};
  std::vector<double> h(l.hidden), z(l.out);
  CompensatedSum total;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    mlp_forward(l, w, data_.sample(i), h, z);
    total.add(cross_entropy(z, static_cast<std::size_t>(data_.labels[i])));
  }
  return total.value() / static_cast<double>(data_.size()) +
         ridge_term(w, ridge_);
}

ParamVector TinyMlpModel::gradient(const ParamVector& w,
                                   std::span<const std::size_t> batch,
                                   Rng* /*noise*/) const {
  check_dim(w, dim());
  check_batch(batch, data_.size());
  const MlpLayout l{data_.dim, hidden_,
                    static_cast<std::size_t>(data_.class_count)};
  ParamVector g(dim());
  std::vector<double> h(l.hidden), z(l.out), dh(l.hidden);
  for (std::size_t j : batch) {
    const auto x = data_.sample(j);
    mlp_forward(l, w, x, h, z);
    softmax_inplace(z);
    z[static_cast<std::size_t>(data_.labels[j])] -= 1.0;
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t k = 0; k < l.out; ++k) {
      const double dz = z[k];
      const double* row = w.data() + l.w2() + k * l.hidden;
      double* grow = g.data() + l.w2() + k * l.hidden;
      for (std::size_t u = 0; u < l.hidden; ++u) {
        grow[u] += dz * h[u];
        dh[u] += dz * row[u];
      }
      g[l.b2() + k] += dz;
    }
    for (std::size_t u = 0; u < l.hidden; ++u) {
      const double da = dh[u] * (1.0 - h[u] * h[u]);
      double* grow = g.data() + l.w1() + u * l.in;
      for (std::size_t f = 0; f < l.in; ++f) grow[f] += da * x[f];
      g[l.b1() + u] += da;
    }
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] = g[k] * inv_b + ridge_ * w[k];
  }
  return g;
}

int TinyMlpModel::predict(const ParamVector& w,
                          std::span<const double> features) const {
  const MlpLayout l{data_.dim, hidden_,
                    static_cast<std::size_t>(data_.class_count)};
  std::vector<double> h(l.hidden), z(l.out);
  mlp_forward(l, w, features, h, z);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

ParamVector TinyMlpModel::initial_params(std::uint64_t seed) const {
  const MlpLayout l{data_.dim, hidden_,
                    static_cast<std::size_t>(data_.class_count)};
  Rng rng = make_stream(seed, StreamTag::kInit);
  ParamVector w(dim());
  std::uniform_real_distribution<double> first(
      -1.0 / std::sqrt(static_cast<double>(l.in)),
      1.0 / std::sqrt(static_cast<double>(l.in)));
  std::uniform_real_distribution<double> second(
      -1.0 / std::sqrt(static_cast<double>(l.hidden)),
      1.0 / std::sqrt(static_cast<double>(l.hidden)));
  for (std::size_t k = 0; k < l.w2(); ++k) w[k] = first(rng);
  for (std::size_t k = l.w2(); k < w.size(); ++k) w[k] = second(rng);
  return w;
}

// ---------------------------------------------------------------------------
// Optimum oracle

Optimum minimize_smooth(
    const std::function<double(const ParamVector&)>& f,
    const std::function<ParamVector(const ParamVector&)>& grad,
    ParamVector start, double smoothness, const MinimizeOptions& options) {
  if (!(smoothness > 0.0)) {
    throw UsageError("minimize_smooth needs a positive smoothness constant");
  }
  const double step = 1.0 / smoothness;
  ParamVector x = std::move(start);
  ParamVector y = x;
  double momentum = 1.0;
  double grad_norm = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const ParamVector gy = grad(y);
    grad_norm = std::sqrt(squared_norm(gy));
    if (grad_norm <= options.tol) return Optimum{y, f(y)};

    ParamVector x_next = y;
    axpy(-step, gy, x_next);
    const ParamVector moved = x_next - x;
    if (dot(gy, moved) > 0.0) {
      // Gradient restart: momentum points uphill.
      momentum = 1.0;
      y = x_next;
    } else {
      const double next =
          0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = x_next;
      axpy((momentum - 1.0) / next, moved, y);
      momentum = next;
    }
    x = std::move(x_next);
  }
  throw OracleError("optimum oracle did not converge: |grad| = " +
                        std::to_string(grad_norm),
                    grad_norm);
}

std::optional<Optimum> local_optimum(const LossModel& model,
                                     const MinimizeOptions& options) {
  if (auto exact = model.analytic_optimum()) return exact;
  if (model.kind() != ModelKind::kLogistic) return std::nullopt;

  const auto& logistic = static_cast<const LogisticModel&>(model);
  if (logistic.ridge() < 1e-6) {
    throw UsageError("local_optimum needs ridge >= 1e-6 for logistic models");
  }
  return minimize_smooth(
      [&](const ParamVector& w) { return model.loss(w); },
      [&](const ParamVector& w) { return model.full_gradient(w); },
      ParamVector(model.dim()), *model.smoothness(), options);
}

}  // namespace fedsim
