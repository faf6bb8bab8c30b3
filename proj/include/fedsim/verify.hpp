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

#ifndef FEDSIM_VERIFY_HPP_
#define FEDSIM_VERIFY_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "fedsim/config.hpp"
#include "fedsim/problem.hpp"
#include "fedsim/simulation.hpp"
#include "fedsim/theory.hpp"

namespace fedsim {

struct BoundCheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max lhs / rhs
  std::size_t worst_step = 0;

  bool ok() const { return checked > 0 && violations == 0; }
};

struct VerifyResult {
  std::string strategy;
  std::size_t seeds = 0;
  std::size_t local_steps = 0;
  TheoryConstants constants;
  double rho_bar = 1.0;
  double rho_tilde = 1.0;
  double Gamma = 0.0;

  BoundCheck theorem1;  // mean delta_{t+1} against the bound at mean delta_t
  BoundCheck lemma2;    // mean discrepancy at every interior step
  bool gamma_ok = true;  // Gamma >= -1e-9
  bool rho_ok = true;    // rho == 1 wherever defined when alpha = p
  bool contraction_ok = true;

  std::vector<double> mean_delta;   // per global step
  std::vector<double> mean_lemma2;  // per global step, 0 at sync

  bool passed() const {
    return theorem1.ok() && (lemma2.checked == 0 || lemma2.ok()) && gamma_ok && rho_ok;
  }
};

// Runs `seeds` seeds (run_seed, run_seed + 1, ...) of the configured
// strategy with step tracing, pools G^2 and the skew extremes over them and
// checks Theorem 1 and Lemma 2 on the seed means. With more than one seed
// Theorem 1 allows a one-sided 99% margin on the mean. Throws UsageError
// when the model has no analytic mu/L or no known optimum.
VerifyResult verify_theory(const ExperimentConfig& cfg, const Problem& problem,
                           std::size_t seeds, int workers = 1);

}  // namespace fedsim

#endif  // FEDSIM_VERIFY_HPP_
