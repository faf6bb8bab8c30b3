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

#include "fedsim/verify.hpp"

#include <algorithm>
#include <cmath>

#include "fedsim/errors.hpp"
#include "fedsim/metrics.hpp"

namespace fedsim {
namespace {

// One-sided 99% normal quantile.
constexpr double kZ99 = 2.3263478740408408;

void record(BoundCheck& check, double lhs, double rhs, std::size_t step) {
  ++check.checked;
  if (!(lhs <= rhs)) ++check.violations;
  const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
  if (ratio > check.worst_ratio || check.checked == 1) {
    check.worst_ratio = ratio;
    check.worst_step = step;
  }
}

}  // namespace

VerifyResult verify_theory(const ExperimentConfig& cfg_in, const Problem& problem,
                           std::size_t seeds, int workers) {
  if (seeds == 0) throw UsageError("verify_theory: need at least one seed");
  if (!problem.global) {
    throw UsageError("theory checks need a known global optimum (quadratic or logistic)");
  }
  ExperimentConfig cfg = cfg_in;
  cfg.federation.theory_checks = true;

  std::vector<RunResult> runs(seeds);
  parallel_for(seeds, workers, [&](std::size_t k) {
    runs[k] = run_training(cfg, problem, cfg.federation.run_seed + k, RunOptions{1});
  });
  if (!runs.front().uniform_steps) {
    throw UsageError("theory checks need the same number of local steps on every client");
  }

  VerifyResult out;
  out.strategy = std::string(to_string(cfg.strategy.kind));
  out.seeds = seeds;
  out.local_steps = runs.front().local_steps;
  out.Gamma = problem.Gamma.value_or(0.0);
  out.gamma_ok = out.Gamma >= -1e-9;

  double max_g = 0.0;
  out.rho_bar = INFINITY;
  out.rho_tilde = -INFINITY;
  for (const auto& run : runs) {
    max_g = std::max(max_g, run.max_grad_sq);
    out.rho_bar = std::min(out.rho_bar, *run.rho_bar);
    out.rho_tilde = std::max(out.rho_tilde, *run.rho_tilde);
    if (cfg.strategy.kind == StrategyKind::kFedAvg) {
      for (const auto& r : run.rounds) {
        if (r.rho && std::abs(*r.rho - 1.0) > 1e-9) out.rho_ok = false;
      }
    }
  }
  out.constants = run_constants(cfg, problem, max_g, cfg.federation.run_seed);
  if (!out.constants.convex()) {
    throw UsageError("theory checks need strong convexity and smoothness constants");
  }
  if (runs.front().steps.empty()) return out;

  const std::size_t steps = runs.front().steps.size();
  const double n = static_cast<double>(seeds);
  std::vector<double> sd(steps, 0.0);
  out.mean_delta.assign(steps, 0.0);
  out.mean_lemma2.assign(steps, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> d(seeds), l(seeds);
    for (std::size_t k = 0; k < seeds; ++k) {
      d[k] = runs[k].steps[t].delta;
      l[k] = runs[k].steps[t].lemma2_lhs;
    }
    out.mean_delta[t] = mean_of(d);
    out.mean_lemma2[t] = mean_of(l);
    sd[t] = sample_sd(d);
  }

  const auto& trace = runs.front().steps;
  const double gamma = std::max(0.0, out.Gamma);
  const int H = static_cast<int>(out.local_steps);
  for (std::size_t t = 0; t + 1 < steps; ++t) {
    Theorem1Inputs in{out.mean_delta[t], H, out.rho_bar, out.rho_tilde, gamma, trace[t].eta};
    const BoundValue rhs = theorem1_rhs(in, out.constants);
    out.contraction_ok = out.contraction_ok && rhs.contraction_ok;
    const double margin = seeds > 1 ? kZ99 * sd[t + 1] / std::sqrt(n) : 0.0;
    record(out.theorem1, out.mean_delta[t + 1] - margin, rhs.value, t + 1);
    if (!trace[t].sync) {
      record(out.lemma2, out.mean_lemma2[t], discrepancy_rhs(trace[t].eta, H, out.constants.G2),
             t);
    }
  }
  return out;
}

}  // namespace fedsim
