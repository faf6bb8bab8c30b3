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

#include "fedsim/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kAnalytic:
      return "analytic";
    case Provenance::kEstimated:
      return "estimated";
    case Provenance::kUnavailable:
      return "unavailable";
  }
  return "unavailable";
}

double heterogeneity_gamma(double f_star, std::span<const double> p,
                           std::span<const double> local_f_star) {
  if (p.size() != local_f_star.size()) {
    throw UsageError("heterogeneity_gamma: size mismatch");
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < p.size(); ++i) acc.add(p[i] * local_f_star[i]);
  return f_star - acc.value();
}

double heterogeneity_gamma(const GlobalObjective& obj,
                           const MinimizeOptions& options) {
  const auto global = global_optimum(obj, options);
  if (!global) {
    throw UsageError("heterogeneity_gamma: global optimum unknown for " +
                     std::string(to_string(obj.model(0).kind())));
  }
  std::vector<double> local(obj.client_count());
  for (std::size_t i = 0; i < obj.client_count(); ++i) {
    local[i] = local_optimum(obj.model(i), options)->value;
  }
  return heterogeneity_gamma(global->value, obj.weights(), local);
}

std::optional<double> weighting_skew(std::span<const double> client_losses,
                                     std::span<const double> local_f_star,
                                     std::span<const double> alphas,
                                     std::span<const double> p) {
  const std::size_t n = client_losses.size();
  if (local_f_star.size() != n || alphas.size() != n || p.size() != n) {
    throw UsageError("weighting_skew: size mismatch");
  }
  CompensatedSum numer, denom;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = client_losses[i] - local_f_star[i];
    numer.add(alphas[i] * gap);
    denom.add(p[i] * gap);
  }
  if (std::abs(denom.value()) <= 1e-12) return std::nullopt;
  return numer.value() / denom.value();
}

std::optional<double> weighting_skew(const GlobalObjective& obj,
                                     std::span<const double> local_f_star,
                                     const AlphaVector& alphas,
                                     const ParamVector& w_eval) {
  std::vector<double> losses(obj.client_count());
  for (std::size_t i = 0; i < obj.client_count(); ++i) {
    losses[i] = obj.model(i).loss(w_eval);
  }
  return weighting_skew(losses, local_f_star, alphas.values, obj.weights());
}

KappaStats kappa_stats(std::span<const AlphaVector> alphas_series,
                       std::span<const double> p) {
  if (alphas_series.empty() || p.empty()) {
    throw UsageError("kappa_stats: empty input");
  }
  KappaStats out;
  out.pi = std::numeric_limits<double>::infinity();
  out.Pi = 0.0;
  for (const auto& alphas : alphas_series) {
    if (alphas.size() != p.size()) throw UsageError("kappa_stats: size mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double kappa = alphas[i] / p[i];
      out.pi = std::min(out.pi, kappa);
      out.Pi = std::max(out.Pi, kappa);
    }
  }
  const double min_p = *std::min_element(p.begin(), p.end());
  out.error_bound = out.pi > 0.0
                        ? 1.0 / (out.pi * min_p) - static_cast<double>(p.size())
                        : std::numeric_limits<double>::infinity();
  return out;
}

BoundValue theorem1_rhs(const Theorem1Inputs& in, const TheoryConstants& c) {
  const double e = static_cast<double>(in.local_steps);
  const double contraction = in.eta * c.mu * (1.0 + 3.0 * in.rho_bar / 8.0);
  BoundValue out;
  out.contraction_ok = contraction < 1.0;
  out.value = (1.0 - contraction) * in.delta +
              in.eta * in.eta *
                  (32.0 * e * e * c.G2 + 6.0 * in.rho_bar * c.L * in.Gamma +
                   c.sigma2) +
              2.0 * in.eta * in.Gamma * (in.rho_tilde - in.rho_bar);
  return out;
}

CorollaryEstimates corollary_estimators(const TheoryConstants& c,
                                        int local_steps, double rho_bar,
                                        double rho_tilde, double Gamma,
                                        double w0_dist2) {
  if (!(rho_bar > 0.0)) {
    throw UsageError("corollary_estimators: rho_bar must be positive");
  }
  const double e = static_cast<double>(local_steps);
  const double mu2 = c.mu * c.mu;
  CorollaryEstimates out;
  out.V_min = 8.0 * c.L * c.L * Gamma / mu2 + c.L * c.gamma * w0_dist2 / 2.0;
  out.V = 4.0 * c.L * (32.0 * e * e * c.G2 + c.sigma2) / (3.0 * mu2 * rho_bar) +
          out.V_min;
  out.error = (8.0 * c.L * Gamma / (3.0 * c.mu)) * (rho_tilde / rho_bar - 1.0);
  return out;
}

DiscrepancyCheck discrepancy_check(std::span<const ParamVector> local_params,
                                   const ParamVector& w_global,
                                   std::span<const double> alphas, double eta,
                                   int local_steps, double G2) {
  if (local_params.size() != alphas.size()) {
    throw UsageError("discrepancy_check: size mismatch");
  }
  CompensatedSum lhs;
  for (std::size_t i = 0; i < local_params.size(); ++i) {
    lhs.add(alphas[i] * squared_distance(w_global, local_params[i]));
  }
  DiscrepancyCheck out;
  out.lhs = lhs.value();
  out.rhs = discrepancy_rhs(eta, local_steps, G2);
  out.ok = out.lhs <= out.rhs;
  return out;
}

TheoryConstants estimate_constants(const ConstantsInput& in) {
  if (in.objective == nullptr) {
    throw UsageError("estimate_constants: no objective");
  }
  const GlobalObjective& obj = *in.objective;
  TheoryConstants c;
  c.G2 = in.max_grad_sq * in.g2_safety;
  c.G2_source = Provenance::kEstimated;

  const ModelKind kind = obj.model(0).kind();
  if (kind == ModelKind::kTinyMlp) return c;

  c.mu = std::numeric_limits<double>::infinity();
  c.L = 0.0;
  for (std::size_t i = 0; i < obj.client_count(); ++i) {
    c.mu = std::min(c.mu, *obj.model(i).strong_convexity());
    c.L = std::max(c.L, *obj.model(i).smoothness());
  }
  c.gamma = 4.0 * c.L / c.mu;

  if (kind == ModelKind::kQuadratic) {
    c.mu_source = c.L_source = Provenance::kAnalytic;
    c.sigma2 = 0.0;
    for (std::size_t i = 0; i < obj.client_count(); ++i) {
      const auto& q = static_cast<const QuadraticModel&>(obj.model(i));
      c.sigma2 = std::max(c.sigma2, q.gradient_variance(in.batch_size));
    }
    c.sigma2_source = Provenance::kAnalytic;
    return c;
  }

  // Logistic: mu is exact (ridge); L comes from power iteration.
  c.mu_source = Provenance::kAnalytic;
  c.L_source = Provenance::kEstimated;
  c.sigma2 = 0.0;
  Rng rng = make_stream(in.probe_seed, StreamTag::kClient, 0xC0FFEE, 0);
  for (std::size_t i = 0; i < obj.client_count(); ++i) {
    const LossModel& m = obj.model(i);
    const std::size_t n = m.sample_count();
    const std::size_t b = std::min(n, std::max<std::size_t>(1, in.batch_size));
    std::vector<std::size_t> order(n);
    for (const auto& w : in.probe_points) {
      const ParamVector full = m.full_gradient(w);
      CompensatedSum acc;
      for (int t = 0; t < in.probe_batches; ++t) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const ParamVector g = m.gradient(w, std::span(order.data(), b));
        acc.add(squared_distance(g, full));
      }
      c.sigma2 = std::max(c.sigma2, acc.value() / in.probe_batches);
    }
  }
  c.sigma2_source = Provenance::kEstimated;
  return c;
}

}  // namespace fedsim
