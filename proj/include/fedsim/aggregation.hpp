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

#ifndef FEDSIM_AGGREGATION_HPP_
#define FEDSIM_AGGREGATION_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedsim/param_vector.hpp"

namespace fedsim {

// What a client hands the server at the end of a round.
struct ClientReport {
  int id = 0;
  double p = 0.0;
  ParamVector w_local;
  double loss_final = 0.0;  // F_i at the configured evaluation point
  double f_star = 0.0;      // F_i*, or 0 when unknown

  double gap() const { return loss_final - f_star; }
};

// Aggregation coefficients, one per report, on the probability simplex.
struct AlphaVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

enum class StrategyKind { kFedAvg, kFedMax, kFedMaxK, kFedSoftMax };

std::string_view to_string(StrategyKind kind);
// Accepts fedavg|fedmax|fedmax_k|fedsoftmax; throws ConfigError otherwise.
StrategyKind parse_strategy(std::string_view name);

struct Strategy {
  StrategyKind kind = StrategyKind::kFedAvg;
  int k = 1;
  double temperature = 15.0;
};

// alpha_i = p_i.
AlphaVector alphas_fedavg(std::span<const ClientReport> reports);

// Uniform mass on every client attaining the largest gap; exact ties all
// share the mass.
AlphaVector alphas_fedmax(std::span<const ClientReport> reports);

// 1/k on the k largest gaps; ties at the cut go to the smaller client id.
// Throws UsageError unless 1 <= k <= N.
AlphaVector alphas_fedmax_k(std::span<const ClientReport> reports, int k);

// alpha_i proportional to p_i exp(gap_i / temperature), evaluated with the
// largest gap subtracted inside the exponent. Throws UsageError unless
// temperature > 0.
AlphaVector alphas_fedsoftmax(std::span<const ClientReport> reports,
                              double temperature);

AlphaVector compute_alphas(const Strategy& strategy,
                           std::span<const ClientReport> reports);

// Weighted average of the reports' local models.
ParamVector aggregate(std::span<const ClientReport> reports,
                      const AlphaVector& alphas);

}  // namespace fedsim

#endif  // FEDSIM_AGGREGATION_HPP_
