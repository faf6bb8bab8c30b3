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

#ifndef FEDSIM_PROBLEM_HPP_
#define FEDSIM_PROBLEM_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "fedsim/config.hpp"
#include "fedsim/dataset.hpp"
#include "fedsim/objective.hpp"

namespace fedsim {

// Everything about a federated task that does not depend on the run seed.
// Built once and shared read-only across seeds and workers.
struct Problem {
  std::shared_ptr<const GlobalObjective> objective;
  std::vector<double> p;
  std::vector<std::size_t> client_sizes;

  // Local optima F_i*; zeros when unknown (tiny-mlp or compute_optima off).
  std::vector<double> f_star;
  bool f_star_known = false;

  std::optional<Optimum> global;   // w*, F*
  std::vector<double> f_at_opt;    // F_i(w*), empty when w* unknown
  std::optional<double> Gamma;

  std::optional<LabeledDataset> test;  // classification kinds only
  std::size_t dropped = 0;

  std::size_t client_count() const { return p.size(); }
  std::size_t dim() const { return objective->dim(); }
  ModelKind kind() const { return objective->model(0).kind(); }
};

// Throws ConfigError / PartitionError / IngestionError / OracleError.
Problem build_problem(const ExperimentConfig& cfg);

// Problem from ready-made client models, with optima computed when possible.
Problem make_problem(std::vector<std::shared_ptr<const LossModel>> models,
                     std::vector<double> p,
                     const MinimizeOptions& options = {},
                     bool compute_optima = true);

// Zeros, except tiny-mlp which draws a fan-in scaled init from the run seed.
ParamVector initial_point(const Problem& problem, std::uint64_t run_seed);

}  // namespace fedsim

#endif  // FEDSIM_PROBLEM_HPP_
