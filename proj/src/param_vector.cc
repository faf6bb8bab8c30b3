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

#include "fedsim/param_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fedsim/errors.hpp"

namespace fedsim {

void require_same_dim(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) {
    throw ConfigError("dimension mismatch: " + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()));
  }
}

bool all_finite(const ParamVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double dot(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b);
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

double squared_norm(const ParamVector& v) { return dot(v, v); }

double squared_distance(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b);
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc.add(d * d);
  }
  return acc.value();
}

void axpy(double scale, const ParamVector& x, ParamVector& y) {
  require_same_dim(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += scale * x[i];
}

ParamVector operator-(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b);
  ParamVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

ParamVector operator+(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b);
  ParamVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

ParamVector operator*(double s, const ParamVector& v) {
  ParamVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

ParamVector weighted_average(std::span<const ParamVector> params,
                             std::span<const double> alphas) {
  if (params.empty() || params.size() != alphas.size()) {
    throw AggregationError("weighted_average: " +
                           std::to_string(params.size()) + " vectors but " +
                           std::to_string(alphas.size()) + " coefficients");
  }
  CompensatedSum total;
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw AggregationError("weighted_average: negative or non-finite alpha");
    }
    total.add(a);
  }
  if (std::abs(total.value() - 1.0) > 1e-9) {
    throw AggregationError("weighted_average: alphas sum to " +
                           std::to_string(total.value()));
  }
  const std::size_t dim = params.front().size();
  for (const auto& p : params) require_same_dim(params.front(), p);

  // Terms are summed in ascending (|x|, x) order. The order depends only on
  // the multiset of terms, so jointly permuting params and alphas gives a
  // bitwise identical result.
  // Each product is split into its rounded value and the exact rounding
  // error, so the sum sees the products without loss.
  ParamVector out(dim);
  const std::size_t n = params.size();
  std::vector<double> terms(2 * n);
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double t = alphas[j] * params[j][k];
      terms[j] = t;
      terms[n + j] = std::fma(alphas[j], params[j][k], -t);
    }
    std::sort(terms.begin(), terms.end(), [](double a, double b) {
      const double fa = std::abs(a), fb = std::abs(b);
      return fa != fb ? fa < fb : a < b;
    });
    CompensatedSum acc;
    for (double t : terms) acc.add(t);
    out[k] = acc.value();
  }
  return out;
}

}  // namespace fedsim
