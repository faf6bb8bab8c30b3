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

#ifndef FEDSIM_PARAM_VECTOR_HPP_
#define FEDSIM_PARAM_VECTOR_HPP_

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fedsim {

// Neumaier's variant of Kahan summation. Every reduction in the simulator
// (weighted averages, dot products, weighted losses) goes through this
// accumulator in a fixed index order, so results do not depend on how the
// work was scheduled.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (!std::isfinite(t)) {
      // inf/nan absorb everything; keep the compensation out of it.
      sum_ = t;
      compensation_ = 0.0;
      return;
    }
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return std::isfinite(sum_) ? sum_ + compensation_ : sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Flat model parameter vector. Dimension is fixed at construction.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim, double fill = 0.0)
      : values_(dim, fill) {}
  explicit ParamVector(std::vector<double> values)
      : values_(std::move(values)) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  const std::vector<double>& values() const { return values_; }

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> values_;
};

// Throws ConfigError when sizes differ.
void require_same_dim(const ParamVector& a, const ParamVector& b);

bool all_finite(const ParamVector& v);

double dot(const ParamVector& a, const ParamVector& b);
double squared_norm(const ParamVector& v);
double squared_distance(const ParamVector& a, const ParamVector& b);

// y += scale * x
void axpy(double scale, const ParamVector& x, ParamVector& y);

ParamVector operator-(const ParamVector& a, const ParamVector& b);
ParamVector operator+(const ParamVector& a, const ParamVector& b);
ParamVector operator*(double s, const ParamVector& v);

// Coordinate-wise sum_j alphas[j] * params[j] with compensated summation
// over the terms in a canonical order, so the result is bitwise invariant
// under joint permutation of (params, alphas). Requires alphas on the
// simplex (sum within 1e-9 of one, all nonnegative); otherwise throws
// AggregationError.
ParamVector weighted_average(std::span<const ParamVector> params,
                             std::span<const double> alphas);

}  // namespace fedsim

#endif  // FEDSIM_PARAM_VECTOR_HPP_
