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

#include "fedsim/client.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

LrSchedule LrSchedule::theoretical(double mu, double smoothness) {
  LrSchedule s;
  s.kind = ScheduleKind::kTheoretical;
  s.mu = mu;
  s.gamma = 4.0 * smoothness / mu;
  return s;
}

LrSchedule LrSchedule::exponential(double eta0, double decay,
                                   std::size_t period) {
  LrSchedule s;
  s.kind = ScheduleKind::kExponential;
  s.eta0 = eta0;
  s.decay = decay;
  s.period = std::max<std::size_t>(1, period);
  return s;
}

double lr_at(const LrSchedule& s, std::size_t t) {
  if (s.kind == ScheduleKind::kTheoretical) {
    return 1.0 / (s.mu * (static_cast<double>(t) + s.gamma));
  }
  const std::size_t round = t / std::max<std::size_t>(1, s.period);
  return s.eta0 * std::pow(s.decay, static_cast<double>(round));
}

double step_rate(const LrSchedule& s, std::size_t round, std::size_t step,
                 std::size_t steps_per_round) {
  LrSchedule local = s;
  local.period = std::max<std::size_t>(1, steps_per_round);
  return lr_at(local, round * steps_per_round + step);
}

std::size_t steps_per_round(std::size_t samples, const LocalTraining& t) {
  const std::size_t b = std::max<std::size_t>(1, t.batch_size);
  return t.epochs * ((samples + b - 1) / b);
}

ClientState client_update(const ClientState& c, const ParamVector& w_global,
                          std::size_t round, const LocalTraining& training,
                          const LrSchedule& schedule) {
  if (!c.model) throw ConfigError("client " + std::to_string(c.id) + " has no model");
  if (training.epochs < 1 || training.batch_size < 1) {
    throw UsageError("local training needs E >= 1 and b >= 1");
  }
  const std::size_t n = c.model->sample_count();
  if (n == 0) {
    throw ConfigError("client " + std::to_string(c.id) + " has no samples");
  }

  ClientState out = c;
  out.w = w_global;
  out.trajectory.clear();
  out.last_report.grad_sq_norms.clear();

  const std::size_t total_steps = steps_per_round(n, training);
  out.last_report.grad_sq_norms.reserve(total_steps);
  if (training.record_trajectory) out.trajectory.reserve(total_steps);

  Rng rng = make_stream(c.run_seed, StreamTag::kClient,
                        static_cast<std::uint64_t>(c.id), round);
  std::vector<std::size_t> order(n);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < training.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += training.batch_size) {
      const std::size_t stop = std::min(n, start + training.batch_size);
      const std::span<const std::size_t> batch(order.data() + start,
                                               stop - start);
      const ParamVector g = c.model->gradient(out.w, batch, &rng);
      out.last_report.grad_sq_norms.push_back(squared_norm(g));
      const double eta = step_rate(schedule, round, step, total_steps);
      axpy(-eta, g, out.w);
      if (!all_finite(out.w)) {
        throw ClientError("client " + std::to_string(c.id) +
                              " diverged at round " + std::to_string(round),
                          c.id);
      }
      if (training.record_trajectory) out.trajectory.push_back(out.w);
      ++step;
    }
  }
  out.last_report.loss_final = c.model->loss(out.w);
  return out;
}

}  // namespace fedsim
