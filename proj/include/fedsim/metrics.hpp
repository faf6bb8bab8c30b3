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

#ifndef FEDSIM_METRICS_HPP_
#define FEDSIM_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fedsim/aggregation.hpp"

namespace fedsim {

// First round (0-based) whose accuracy reaches `threshold`.
std::optional<std::size_t> rounds_to_threshold(std::span<const double> curve,
                                               double threshold);

struct RoundsToThreshold {
  bool crossed = false;      // at least one curve crossed
  double mean = 0.0;
  double lo = 0.0;           // mean - 1.96 sd / sqrt(n)
  double hi = 0.0;
  std::size_t finite = 0;    // curves that crossed
  std::size_t missing = 0;   // curves that never crossed, excluded
  std::vector<double> values;
};

// 95% normal CI over the curves that cross. A single crossing curve gives a
// degenerate interval. Throws UsageError on no curves or a threshold
// outside (0, 1).
RoundsToThreshold r90_ci(std::span<const std::vector<double>> curves,
                         double threshold);

// Coefficient of variation of the round-to-round changes: sd(diff) /
// |mean(diff)| with the sample standard deviation. +inf when the mean
// change is below 1e-12 in magnitude. Throws UsageError for fewer than 3
// points.
double stability_index(std::span<const double> curve);

struct AlphaConvergence {
  std::vector<double> deviation;  // max_i |alpha_t^i - p_i| per round
  // Least-squares slope of log(deviation) against log(round + 1) over the
  // second half of the rounds; nullopt when fewer than two positive
  // deviations are available there.
  std::optional<double> exponent;
};

// Throws UsageError for fewer than 10 rounds.
AlphaConvergence alpha_convergence(std::span<const AlphaVector> alphas_series,
                                   std::span<const double> p);

// Sample median; averages the middle pair.
double median(std::vector<double> values);

// Sample mean and standard deviation (n - 1).
double mean_of(std::span<const double> values);
double sample_sd(std::span<const double> values);

}  // namespace fedsim

#endif  // FEDSIM_METRICS_HPP_
