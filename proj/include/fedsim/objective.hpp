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

#ifndef FEDSIM_OBJECTIVE_HPP_
#define FEDSIM_OBJECTIVE_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "fedsim/loss_model.hpp"

namespace fedsim {

// F(w) = sum_i p_i F_i(w).
class GlobalObjective {
 public:
  // Throws ConfigError unless weights lie in (0, 1], sum to one within 1e-12
  // and all models share one dimension.
  GlobalObjective(std::vector<std::shared_ptr<const LossModel>> models,
                  std::vector<double> weights);

  std::size_t client_count() const { return models_.size(); }
  std::size_t dim() const { return models_.front()->dim(); }
  const LossModel& model(std::size_t i) const { return *models_[i]; }
  const std::shared_ptr<const LossModel>& model_ptr(std::size_t i) const {
    return models_[i];
  }
  const std::vector<double>& weights() const { return weights_; }

  double loss(const ParamVector& w) const;
  ParamVector full_gradient(const ParamVector& w) const;

 private:
  std::vector<std::shared_ptr<const LossModel>> models_;
  std::vector<double> weights_;
};

inline double global_loss(const GlobalObjective& obj, const ParamVector& w) {
  return obj.loss(w);
}

// (w*, F*). Closed form when every client is quadratic, the minimizer oracle
// for logistic clients, nullopt for the tiny MLP.
std::optional<Optimum> global_optimum(const GlobalObjective& obj,
                                      const MinimizeOptions& options = {});

}  // namespace fedsim

#endif  // FEDSIM_OBJECTIVE_HPP_
