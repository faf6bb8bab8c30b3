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

#include "fedsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedsim/errors.hpp"

namespace fedsim {

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value() / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  CompensatedSum acc;
  for (double v : values) acc.add((v - m) * (v - m));
  return std::sqrt(acc.value() / static_cast<double>(values.size() - 1));
}

double median(std::vector<double> values) {
  if (values.empty()) throw UsageError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::optional<std::size_t> rounds_to_threshold(std::span<const double> curve,
                                               double threshold) {
  for (std::size_t r = 0; r < curve.size(); ++r) {
    if (curve[r] >= threshold) return r;
  }
  return std::nullopt;
}

RoundsToThreshold r90_ci(std::span<const std::vector<double>> curves,
                         double threshold) {
  if (curves.empty()) throw UsageError("r90_ci: no accuracy curves");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw UsageError("r90_ci: threshold must lie in (0, 1)");
  }
  RoundsToThreshold out;
  for (const auto& curve : curves) {
    if (auto r = rounds_to_threshold(curve, threshold)) {
      out.values.push_back(static_cast<double>(*r));
    } else {
      ++out.missing;
    }
  }
  out.finite = out.values.size();
  out.crossed = out.finite > 0;
  if (!out.crossed) {
    out.mean = out.lo = out.hi = std::numeric_limits<double>::infinity();
    return out;
  }
  out.mean = mean_of(out.values);
  const double half = 1.96 * sample_sd(out.values) /
                      std::sqrt(static_cast<double>(out.finite));
  out.lo = out.mean - half;
  out.hi = out.mean + half;
  return out;
}

double stability_index(std::span<const double> curve) {
  if (curve.size() < 3) {
    throw UsageError("stability_index needs at least 3 points");
  }
  std::vector<double> diffs(curve.size() - 1);
  for (std::size_t t = 0; t + 1 < curve.size(); ++t) {
    diffs[t] = curve[t + 1] - curve[t];
  }
  const double m = mean_of(diffs);
  if (std::abs(m) < 1e-12) return std::numeric_limits<double>::infinity();
  return sample_sd(diffs) / std::abs(m);
}

AlphaConvergence alpha_convergence(std::span<const AlphaVector> alphas_series,
                                   std::span<const double> p) {
  if (alphas_series.size() < 10) {
    throw UsageError("alpha_convergence needs at least 10 rounds");
  }
  AlphaConvergence out;
  out.deviation.reserve(alphas_series.size());
  for (const auto& alphas : alphas_series) {
    if (alphas.size() != p.size()) {
      throw UsageError("alpha_convergence: size mismatch");
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      dev = std::max(dev, std::abs(alphas[i] - p[i]));
    }
    out.deviation.push_back(dev);
  }

  std::vector<double> xs, ys;
  for (std::size_t r = alphas_series.size() / 2; r < alphas_series.size(); ++r) {
    if (out.deviation[r] > 0.0) {
      xs.push_back(std::log(static_cast<double>(r + 1)));
      ys.push_back(std::log(out.deviation[r]));
    }
  }
  if (xs.size() < 2) return out;
  const double mx = mean_of(xs), my = mean_of(ys);
  CompensatedSum sxy, sxx;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxy.add((xs[j] - mx) * (ys[j] - my));
    sxx.add((xs[j] - mx) * (xs[j] - mx));
  }
  out.exponent = sxy.value() / sxx.value();
  return out;
}

}  // namespace fedsim
