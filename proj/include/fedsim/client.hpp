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

#ifndef FEDSIM_CLIENT_HPP_
#define FEDSIM_CLIENT_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "fedsim/loss_model.hpp"
#include "fedsim/param_vector.hpp"

namespace fedsim {

enum class ScheduleKind { kTheoretical, kExponential };

// Learning-rate schedule.
//   theoretical: eta_t = 1 / (mu (t + gamma)), t = global SGD step
//   exponential: eta_t = eta0 * decay^r, r = floor(t / period) the round
struct LrSchedule {
  ScheduleKind kind = ScheduleKind::kExponential;
  double mu = 1.0;
  double gamma = 4.0;
  double eta0 = 1e-4;
  double decay = 0.99;
  std::size_t period = 1;

  static LrSchedule theoretical(double mu, double smoothness);
  static LrSchedule exponential(double eta0, double decay, std::size_t period);
};

double lr_at(const LrSchedule& s, std::size_t t);

// Rate used for local step `step` (0-based) of `round`, for a client that
// takes `steps_per_round` steps each round.
double step_rate(const LrSchedule& s, std::size_t round, std::size_t step,
                 std::size_t steps_per_round);

struct ClientReportData {
  double loss_final = 0.0;           // F_i at the post-training local model
  std::vector<double> grad_sq_norms;  // ||g||^2 of every step taken
};

struct ClientState {
  int id = 0;
  std::shared_ptr<const LossModel> model;
  double p = 0.0;
  ParamVector w;
  std::uint64_t run_seed = 0;
  ClientReportData last_report;
  // Local iterates after each step of the last round; filled only when
  // trajectories are requested.
  std::vector<ParamVector> trajectory;
};

struct LocalTraining {
  std::size_t epochs = 2;
  std::size_t batch_size = 64;
  bool record_trajectory = false;
};

// SGD steps taken per round: epochs * ceil(n / b).
std::size_t steps_per_round(std::size_t samples, const LocalTraining& t);

// E epochs of shuffled mini-batch SGD from w_global. The shuffle and any
// model noise come from the stream (run_seed, id, round), so the result is
// independent of other clients and of scheduling.
ClientState client_update(const ClientState& c, const ParamVector& w_global,
                          std::size_t round, const LocalTraining& training,
                          const LrSchedule& schedule);

}  // namespace fedsim

#endif  // FEDSIM_CLIENT_HPP_
