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

#ifndef FEDSIM_CONFIG_HPP_
#define FEDSIM_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedsim/aggregation.hpp"
#include "fedsim/client.hpp"
#include "fedsim/loss_model.hpp"

namespace fedsim {

enum class EvalPoint { kLocal, kGlobal };
enum class DataSource { kSynthetic, kIdx, kQuadratic };
enum class PartitionMode { kIid, kShards, kHandpick };

struct FederationConfig {
  int n_clients = 50;
  std::size_t rounds = 50;
  std::size_t local_epochs = 2;
  std::size_t batch_size = 64;
  double client_ratio = 1.0;
  std::uint64_t run_seed = 1;
  int workers = 1;
  bool theory_checks = false;
  EvalPoint loss_eval_point = EvalPoint::kLocal;
};

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::kExponential;
  double eta0 = 1e-4;
  double decay = 0.99;
  // Theoretical schedule; derived from the problem's mu and L when unset.
  std::optional<double> mu;
  std::optional<double> gamma;
};

struct ModelConfig {
  ModelKind kind = ModelKind::kLogistic;
  double ridge = 1e-2;
  std::size_t hidden = 16;
};

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  std::uint64_t seed = 1;
  // synthetic blobs
  int classes = 10;
  int per_class = 1200;
  int dim = 10;
  double separation = 4.0;
  double test_fraction = 0.1;
  // idx
  std::string train_images, train_labels, test_images, test_labels;
  std::size_t limit = 0;  // 0 keeps every sample
  // quadratic testbed
  int quad_dim = 2;
  double spread = 2.0;
  double curvature_min = 1.0;
  double curvature_max = 1.0;
  double jitter_variance = 0.0;
  std::size_t samples_per_client = 1;
  bool random_weights = false;
};

struct PartitionConfig {
  PartitionMode mode = PartitionMode::kShards;
  std::size_t client_dataset_size = 200;
  std::size_t shard_size = 60;
  std::uint64_t seed = 1;
  std::vector<int> handpick;  // owner per shard, -1 unused
};

struct EvaluationConfig {
  double accuracy_threshold = 0.9;
  double g2_safety = 1.5;
  double oracle_tol = 1e-10;
  int oracle_max_iterations = 200000;
  bool compute_optima = true;
  std::size_t participation_top = 10;
};

struct SweepConfig {
  std::vector<StrategyKind> strategies;  // empty: the configured strategy
  std::string framework;                 // empty: derived from the data
  std::size_t seeds = 1;
};

struct ExperimentConfig {
  FederationConfig federation;
  Strategy strategy;
  ScheduleConfig schedule;
  ModelConfig model;
  DataConfig data;
  PartitionConfig partition;
  EvaluationConfig evaluation;
  SweepConfig sweep;

  // Label for summary rows: sweep.framework or IID / NIID / HANDPICK / QUAD.
  std::string framework_label() const;
};

// Flat key-value dialect with [sections]:
//
//   # comment
//   [federation]
//   n_clients = 10
//   [strategy]
//   name = fedsoftmax
//   temperature = 15
//
// Unknown sections or keys, malformed values and constraint violations raise
// ConfigError naming the offending key. Missing keys keep their defaults.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

// Every key with its resolved value, in the dialect above. parse_config_text
// of the result reproduces the config.
std::string serialize_config(const ExperimentConfig& cfg);

// Throws ConfigError on cross-key constraint violations.
void validate(const ExperimentConfig& cfg);

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace fedsim

#endif  // FEDSIM_CONFIG_HPP_
