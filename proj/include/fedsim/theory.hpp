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

// Convergence-analysis quantities for weighted federated averaging:
// heterogeneity, weighting skew, coefficient ratios, the one-step distance
// bound, its closed-form speed/error estimators, and the local-model
// discrepancy bound. All functions are pure.

#ifndef FEDSIM_THEORY_HPP_
#define FEDSIM_THEORY_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedsim/aggregation.hpp"
#include "fedsim/objective.hpp"

namespace fedsim {

enum class Provenance { kAnalytic, kEstimated, kUnavailable };

std::string_view to_string(Provenance p);

struct TheoryConstants {
  double mu = 0.0;
  double L = 0.0;
  double G2 = 0.0;
  double sigma2 = 0.0;
  double gamma = 0.0;  // 4 L / mu

  Provenance mu_source = Provenance::kUnavailable;
  Provenance L_source = Provenance::kUnavailable;
  Provenance G2_source = Provenance::kUnavailable;
  Provenance sigma2_source = Provenance::kUnavailable;

  bool convex() const { return mu_source != Provenance::kUnavailable; }
};

// Gamma = F* - sum_i p_i F_i*.
double heterogeneity_gamma(double f_star, std::span<const double> p,
                           std::span<const double> local_f_star);

// Computes the optima with the oracles first. Throws UsageError for kinds
// without a known optimum and propagates OracleError.
double heterogeneity_gamma(const GlobalObjective& obj,
                           const MinimizeOptions& options = {});

// rho = sum_i alpha_i (F_i(w) - F_i*) / sum_i p_i (F_i(w) - F_i*), from
// per-client losses already evaluated at w. nullopt when the denominator is
// within 1e-12 of zero.
std::optional<double> weighting_skew(std::span<const double> client_losses,
                                     std::span<const double> local_f_star,
                                     std::span<const double> alphas,
                                     std::span<const double> p);

std::optional<double> weighting_skew(const GlobalObjective& obj,
                                     std::span<const double> local_f_star,
                                     const AlphaVector& alphas,
                                     const ParamVector& w_eval);

struct KappaStats {
  double pi = 0.0;   // min over rounds and clients of alpha / p
  double Pi = 0.0;   // max of the same
  double error_bound = 0.0;  // 1 / (pi * min p) - N; +inf when pi == 0
  bool bounded() const { return pi > 0.0; }
};

KappaStats kappa_stats(std::span<const AlphaVector> alphas_series,
                       std::span<const double> p);

struct Theorem1Inputs {
  double delta = 0.0;  // E||w_t - w*||^2
  int local_steps = 1;
  double rho_bar = 1.0;
  double rho_tilde = 1.0;
  double Gamma = 0.0;
  double eta = 0.0;
};

struct BoundValue {
  double value = 0.0;
  bool contraction_ok = true;  // eta mu (1 + 3 rho_bar / 8) < 1
};

// (1 - eta mu (1 + 3 rho_bar/8)) delta
//   + eta^2 (32 E^2 G^2 + 6 rho_bar L Gamma + sigma^2)
//   + 2 eta Gamma (rho_tilde - rho_bar)
BoundValue theorem1_rhs(const Theorem1Inputs& in, const TheoryConstants& c);

struct CorollaryEstimates {
  double V = 0.0;
  double error = 0.0;
  double V_min = 0.0;
};

// V = 4L(32E^2G^2 + sigma^2)/(3 mu^2 rho_bar) + 8 L^2 Gamma/mu^2
//     + L gamma ||w0 - w*||^2 / 2
// error = (8 L Gamma / (3 mu)) (rho_tilde / rho_bar - 1)
// V_min = 8 L^2 Gamma / mu^2 + L gamma ||w0 - w*||^2 / 2
// Throws UsageError unless rho_bar > 0.
CorollaryEstimates corollary_estimators(const TheoryConstants& c,
                                        int local_steps, double rho_bar,
                                        double rho_tilde, double Gamma,
                                        double w0_dist2);

struct DiscrepancyCheck {
  double lhs = 0.0;  // sum_i alpha_i ||w - w_i||^2
  double rhs = 0.0;  // 16 eta^2 E^2 G^2
  bool ok = true;
};

DiscrepancyCheck discrepancy_check(std::span<const ParamVector> local_params,
                                   const ParamVector& w_global,
                                   std::span<const double> alphas, double eta,
                                   int local_steps, double G2);

inline double discrepancy_rhs(double eta, int local_steps, double G2) {
  const double e = static_cast<double>(local_steps);
  return 16.0 * eta * eta * e * e * G2;
}

struct ConstantsInput {
  const GlobalObjective* objective = nullptr;
  double max_grad_sq = 0.0;     // largest ||g||^2 observed in the trace
  double g2_safety = 1.5;
  std::size_t batch_size = 1;
  // Logistic sigma^2 is measured at these points with random batches.
  std::vector<ParamVector> probe_points;
  int probe_batches = 16;
  std::uint64_t probe_seed = 0;
};

// Quadratic: mu, L from min/max curvature, sigma^2 from the jitter variance
// (analytic). Logistic: mu = ridge, L = ridge + lambda_max estimate,
// sigma^2 measured. G^2 is always max observed ||g||^2 times the safety
// factor. Non-convex kinds get mu/L marked unavailable.
TheoryConstants estimate_constants(const ConstantsInput& in);

}  // namespace fedsim

#endif  // FEDSIM_THEORY_HPP_
