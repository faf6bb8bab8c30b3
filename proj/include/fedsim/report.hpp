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

#ifndef FEDSIM_REPORT_HPP_
#define FEDSIM_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedsim/config.hpp"
#include "fedsim/metrics.hpp"
#include "fedsim/problem.hpp"
#include "fedsim/simulation.hpp"
#include "fedsim/theory.hpp"

namespace fedsim {

namespace fs = std::filesystem;

// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string csv_number(double v);

// Header: round, global_loss, accuracy, dist2_to_opt, rho, thm1_rhs,
// lemma2_lhs, lemma2_rhs, alpha_0 .. alpha_{N-1}. Missing values are empty.
void write_round_log(const RunResult& run, const fs::path& path);

// One row per round, 1 for the `top` largest alphas (smaller id wins ties).
void write_participation(const RunResult& run, std::size_t top, const fs::path& path);

// round, client, loss_reported, loss_at_start.
void write_client_log(const RunResult& run, const fs::path& path);

// t, sync, eta, delta, thm1_next, thm1_ok, lemma2_lhs.
void write_step_log(const RunResult& run, const fs::path& path);

// index, value of the final global model.
void write_model(const ParamVector& w, const fs::path& path);

// Config snapshot, version, seed, start time and output paths. Written
// before round 0 and never touched again.
void write_manifest(const ExperimentConfig& cfg, std::uint64_t run_seed,
                    const std::vector<fs::path>& outputs, const fs::path& path);

// Deterministic run facts needed to replay the bound columns.
void write_theory(const ExperimentConfig& cfg, const Problem& problem, const RunResult& run,
                  const fs::path& path);

// Every file of a single run under `dir`. Returns the paths written.
std::vector<fs::path> write_run(const ExperimentConfig& cfg, const Problem& problem,
                                const RunResult& run, const fs::path& dir);

struct SummaryRow {
  std::string framework;
  std::string strategy;
  std::size_t seeds = 0;
  RoundsToThreshold r90;
  double final_accuracy = 0.0;  // mean over seeds
  double stability = 0.0;       // mean over seeds
  KappaStats kappa;
  std::optional<double> Gamma;
};

SummaryRow summarize(const std::string& framework, const std::string& strategy,
                     const std::vector<RunResult>& runs, const Problem& problem,
                     double threshold);

void write_summary(const std::vector<SummaryRow>& rows, const fs::path& csv_path,
                   const fs::path& text_path);

struct InspectReport {
  std::size_t rounds = 0;
  std::size_t clients = 0;
  double max_rho_diff = 0.0;
  double max_thm1_diff = 0.0;
  double max_lemma2_diff = 0.0;
  std::size_t rho_checked = 0;
  std::size_t bounds_checked = 0;
  std::optional<std::size_t> r_threshold;
  double threshold = 0.9;
  std::optional<double> final_accuracy;
  std::optional<double> stability;
  std::optional<KappaStats> kappa;
  bool consistent = true;  // every recomputed column within 1e-9
};

// Accepts a run directory or its rounds.csv. Reads clients.csv and
// theory.json next to it. Throws IngestionError naming the file.
InspectReport inspect_log(const fs::path& target);

}  // namespace fedsim

#endif  // FEDSIM_REPORT_HPP_
