/**
 * Copyright 2026 The attrfl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ATTRFL_PARAM_VECTOR_HPP_
#define ATTRFL_PARAM_VECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attrfl {

// Flat model parameterization. Every update, gradient and aggregate in the
// simulator lives in this space; the length is fixed at construction.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t size) : values_(size, 0.0) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double &operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double> &values() const { return values_; }

  ParamVector &operator+=(const ParamVector &other);
  ParamVector &operator-=(const ParamVector &other);
  ParamVector &operator*=(double s);
  // this += s * other
  ParamVector &axpy(double s, const ParamVector &other);

  double dot(const ParamVector &other) const;
  double norm() const;
  double squared_norm() const;
  bool all_finite() const;

  bool operator==(const ParamVector &other) const = default;

 private:
  std::vector<double> values_;
};

ParamVector operator+(ParamVector a, const ParamVector &b);
ParamVector operator-(ParamVector a, const ParamVector &b);
ParamVector operator*(double s, ParamVector a);

// Cosine similarity; returns 0 when either vector has zero norm.
double cosine(const ParamVector &a, const ParamVector &b);

// Coordinate-wise median over a non-empty set of equal-length vectors.
// Even counts average the two middle values.
ParamVector coordinate_median(std::span<const ParamVector> vectors);

// Length-prefixed little-endian binary: u64 count followed by IEEE-754
// doubles.
std::string serialize(const ParamVector &p);
ParamVector deserialize(std::string_view bytes);

}  // namespace attrfl

#endif  // ATTRFL_PARAM_VECTOR_HPP_
