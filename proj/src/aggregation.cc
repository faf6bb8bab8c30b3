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

#include "fedsim/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedsim/errors.hpp"

namespace fedsim {
namespace {

void require_reports(std::span<const ClientReport> reports) {
  if (reports.empty()) throw UsageError("aggregation needs at least one report");
  for (const auto& r : reports) {
    if (!std::isfinite(r.gap())) {
      throw AggregationError("client " + std::to_string(r.id) +
                             " reported a non-finite loss gap");
    }
  }
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kFedAvg:
      return "fedavg";
    case StrategyKind::kFedMax:
      return "fedmax";
    case StrategyKind::kFedMaxK:
      return "fedmax_k";
    case StrategyKind::kFedSoftMax:
      return "fedsoftmax";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  if (name == "fedavg") return StrategyKind::kFedAvg;
  if (name == "fedmax") return StrategyKind::kFedMax;
  if (name == "fedmax_k") return StrategyKind::kFedMaxK;
  if (name == "fedsoftmax") return StrategyKind::kFedSoftMax;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

AlphaVector alphas_fedavg(std::span<const ClientReport> reports) {
  require_reports(reports);
  AlphaVector a;
  a.values.reserve(reports.size());
  for (const auto& r : reports) a.values.push_back(r.p);
  return a;
}

AlphaVector alphas_fedmax(std::span<const ClientReport> reports) {
  require_reports(reports);
  double best = reports.front().gap();
  for (const auto& r : reports) best = std::max(best, r.gap());
  std::size_t ties = 0;
  for (const auto& r : reports) ties += (r.gap() == best);
  AlphaVector a;
  a.values.reserve(reports.size());
  for (const auto& r : reports) {
    a.values.push_back(r.gap() == best ? 1.0 / static_cast<double>(ties) : 0.0);
  }
  return a;
}

AlphaVector alphas_fedmax_k(std::span<const ClientReport> reports, int k) {
  require_reports(reports);
  if (k < 1 || static_cast<std::size_t>(k) > reports.size()) {
    throw UsageError("fedmax_k: k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(reports.size()) + "]");
  }
  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (reports[a].gap() != reports[b].gap()) {
      return reports[a].gap() > reports[b].gap();
    }
    return reports[a].id < reports[b].id;
  });
  AlphaVector a;
  a.values.assign(reports.size(), 0.0);
  for (int j = 0; j < k; ++j) {
    a.values[order[static_cast<std::size_t>(j)]] = 1.0 / static_cast<double>(k);
  }
  return a;
}

AlphaVector alphas_fedsoftmax(std::span<const ClientReport> reports,
                              double temperature) {
  require_reports(reports);
  if (!(temperature > 0.0)) {
    throw UsageError("fedsoftmax: temperature must be positive");
  }
  double best = reports.front().gap();
  for (const auto& r : reports) best = std::max(best, r.gap());

  AlphaVector a;
  a.values.reserve(reports.size());
  CompensatedSum total;
  for (const auto& r : reports) {
    const double weight = r.p * std::exp((r.gap() - best) / temperature);
    a.values.push_back(weight);
    total.add(weight);
  }
  const double norm = total.value();
  for (double& v : a.values) v /= norm;
  return a;
}

AlphaVector compute_alphas(const Strategy& strategy,
                           std::span<const ClientReport> reports) {
  switch (strategy.kind) {
    case StrategyKind::kFedAvg:
      return alphas_fedavg(reports);
    case StrategyKind::kFedMax:
      return alphas_fedmax(reports);
    case StrategyKind::kFedMaxK:
      return alphas_fedmax_k(reports, strategy.k);
    case StrategyKind::kFedSoftMax:
      return alphas_fedsoftmax(reports, strategy.temperature);
  }
  throw UsageError("unhandled strategy");
}

ParamVector aggregate(std::span<const ClientReport> reports,
                      const AlphaVector& alphas) {
  std::vector<ParamVector> params;
  params.reserve(reports.size());
  for (const auto& r : reports) params.push_back(r.w_local);
  return weighted_average(params, alphas.values);
}

}  // namespace fedsim
