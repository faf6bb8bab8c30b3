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

#include "fedsim/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedsim/errors.hpp"

namespace fedsim {

GlobalObjective::GlobalObjective(
    std::vector<std::shared_ptr<const LossModel>> models,
    std::vector<double> weights)
    : models_(std::move(models)), weights_(std::move(weights)) {
  if (models_.empty()) throw ConfigError("objective has no clients");
  if (models_.size() != weights_.size()) {
    throw ConfigError("objective: one weight per client required");
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < models_.size(); ++i) {
    if (!models_[i]) throw ConfigError("objective: null client model");
    if (models_[i]->dim() != models_.front()->dim()) {
      throw ConfigError("objective: client " + std::to_string(i) +
                        " has a different dimension");
    }
    if (models_[i]->kind() != models_.front()->kind()) {
      throw ConfigError("objective: clients must share one model kind");
    }
    if (!(weights_[i] > 0.0 && weights_[i] <= 1.0)) {
      throw ConfigError("objective: weight of client " + std::to_string(i) +
                        " outside (0, 1]");
    }
    total.add(weights_[i]);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw ConfigError("objective: weights sum to " +
                      std::to_string(total.value()));
  }
}

double GlobalObjective::loss(const ParamVector& w) const {
  CompensatedSum acc;
  for (std::size_t i = 0; i < models_.size(); ++i) {
    acc.add(weights_[i] * models_[i]->loss(w));
  }
  return acc.value();
}

ParamVector GlobalObjective::full_gradient(const ParamVector& w) const {
  std::vector<ParamVector> grads;
  grads.reserve(models_.size());
  for (const auto& m : models_) grads.push_back(m->full_gradient(w));
  return weighted_average(grads, weights_);
}

std::optional<Optimum> global_optimum(const GlobalObjective& obj,
                                      const MinimizeOptions& options) {
  const ModelKind kind = obj.model(0).kind();
  if (kind == ModelKind::kQuadratic) {
    // Stationarity: sum_i p_i a_i (w - c_i) = 0.
    ParamVector numer(obj.dim());
    CompensatedSum denom;
    std::vector<CompensatedSum> coords(obj.dim());
    for (std::size_t i = 0; i < obj.client_count(); ++i) {
      const auto& q = static_cast<const QuadraticModel&>(obj.model(i));
      const double pa = obj.weights()[i] * q.curvature();
      denom.add(pa);
      for (std::size_t k = 0; k < obj.dim(); ++k) {
        coords[k].add(pa * q.center()[k]);
      }
    }
    for (std::size_t k = 0; k < obj.dim(); ++k) {
      numer[k] = coords[k].value() / denom.value();
    }
    const double value = obj.loss(numer);
    return Optimum{std::move(numer), value};
  }
  if (kind != ModelKind::kLogistic) return std::nullopt;

  double smoothness = 0.0;
  for (std::size_t i = 0; i < obj.client_count(); ++i) {
    smoothness = std::max(smoothness, *obj.model(i).smoothness());
  }
  return minimize_smooth([&](const ParamVector& w) { return obj.loss(w); },
                         [&](const ParamVector& w) {
                           return obj.full_gradient(w);
                         },
                         ParamVector(obj.dim()), smoothness, options);
}

}  // namespace fedsim
