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

#ifndef FEDSIM_SIMULATION_HPP_
#define FEDSIM_SIMULATION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fedsim/aggregation.hpp"
#include "fedsim/client.hpp"
#include "fedsim/config.hpp"
#include "fedsim/problem.hpp"
#include "fedsim/theory.hpp"

namespace fedsim {

// Runs body(i) for i in [0, n) on up to `workers` threads. Exceptions are
// collected and the one with the smallest index is rethrown.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body);

struct RoundRecord {
  std::size_t round = 0;
  AlphaVector alphas;
  std::vector<double> client_loss;      // reported loss_final per client
  std::vector<double> client_at_start;  // F_i(w_r), the broadcast model
  double global_loss = 0.0;             // F(w_{r+1})
  std::optional<double> accuracy;       // test accuracy of w_{r+1}
  std::optional<double> dist2_to_opt;   // ||w_{r+1} - w*||^2
  std::optional<double> rho;            // rho(r, w_r)
  std::optional<double> rho_opt;        // rho(r, w*)
  std::optional<double> thm1_rhs;       // envelope on dist2_to_opt
  std::optional<double> lemma2_lhs;     // last pre-sync step of the round
  std::optional<double> lemma2_rhs;
  bool contraction_ok = true;
  double wall_seconds = 0.0;
};

// One global step t of the virtual sequence. Interior steps average the
// local models with p, sync steps hold the aggregated model.
struct StepTrace {
  std::size_t t = 0;
  double eta = 0.0;            // rate applied on the way to t + 1
  double delta = 0.0;          // ||w_t - w*||^2
  double lemma2_lhs = 0.0;     // sum_i p_i ||w_t - w_t^i||^2, 0 at sync
  bool sync = false;
  double thm1_next = 0.0;      // bound on delta at t + 1
  bool thm1_ok = true;
};

struct RunResult {
  std::uint64_t run_seed = 0;
  ParamVector w0;
  ParamVector w_final;
  std::vector<RoundRecord> rounds;
  std::vector<StepTrace> steps;  // filled when theory checks are on
  std::size_t local_steps = 0;   // H, steps per round (max over clients)
  bool uniform_steps = true;
  double max_grad_sq = 0.0;
  LrSchedule schedule;

  std::optional<TheoryConstants> constants;
  std::optional<double> rho_bar;
  std::optional<double> rho_tilde;
  std::optional<double> delta0;  // ||w0 - w*||^2

  std::vector<double> accuracy_curve() const;
  std::vector<AlphaVector> alpha_series() const;
};

// Rate schedule for a config: theoretical uses the configured mu/gamma or
// the problem's analytic mu and L.
LrSchedule resolve_schedule(const ExperimentConfig& cfg, const Problem& problem);

struct RunOptions {
  std::optional<int> workers;  // overrides cfg.federation.workers
};

// Round-by-round driver. Holds the global model, the client states and the
// step trace collected so far.
class Simulation {
 public:
  Simulation(const ExperimentConfig& cfg, const Problem& problem, std::uint64_t run_seed,
             const RunOptions& options = {});

  // Broadcast, local training on every client, aggregation. Throws
  // ClientError carrying the id of the failing client.
  RoundRecord run_round();

  std::size_t round() const { return round_; }
  const ParamVector& global() const { return w_; }

  // Moves the accumulated trace out; the final sync step is appended.
  RunResult finish();

 private:
  const ExperimentConfig& cfg_;
  const Problem& problem_;
  int workers_;
  LocalTraining training_;
  LrSchedule schedule_;
  Strategy strategy_;
  ParamVector w_;
  std::size_t round_ = 0;
  std::vector<ClientState> clients_;
  RunResult result_;
  bool trace_steps_ = false;
};

// Algorithm 1 with full participation. Deterministic in (cfg, problem,
// run_seed); the worker count never changes the result.
RunResult run_training(const ExperimentConfig& cfg, const Problem& problem,
                       std::uint64_t run_seed, const RunOptions& options = {});

// Constants for the bound checks of one run or of a pooled set of runs.
TheoryConstants run_constants(const ExperimentConfig& cfg, const Problem& problem,
                              double max_grad_sq, std::uint64_t probe_seed,
                              std::span<const ParamVector> probe_points = {});

// Fills rho_bar/rho_tilde, step bounds and the per-round bound columns.
// Needs w* and equal step counts across clients for the step quantities.
void annotate_theory(RunResult& run, const Problem& problem,
                     const TheoryConstants& constants);

struct TheoryContext {
  TheoryConstants constants;
  LrSchedule schedule;
  std::size_t local_steps = 1;
  double rho_bar = 1.0;
  double rho_tilde = 1.0;
  double Gamma = 0.0;
};

// Theorem 1 right-hand side iterated across the H steps of round r from
// the squared distance at the round's start.
BoundValue round_envelope(const TheoryContext& ctx, std::size_t round, double delta_start);

// 16 eta^2 H^2 G^2 at the last pre-sync step of round r.
double round_lemma2_rhs(const TheoryContext& ctx, std::size_t round);

// rho_bar is the min over rounds of rho(r, w_r); rho_tilde the max of
// rho(r, w*), falling back to rho_bar when undefined (Gamma == 0). With no
// defined rho at all both are 1.
std::pair<double, double> skew_extremes(const std::vector<RoundRecord>& rounds);

}  // namespace fedsim

#endif  // FEDSIM_SIMULATION_HPP_
