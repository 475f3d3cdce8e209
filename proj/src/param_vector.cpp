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

#include "attrfl/param_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace attrfl {

namespace {

void require_same_size(const ParamVector &a, const ParamVector &b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("ParamVector size mismatch: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
}

template <typename T>
void put_le(std::string &out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(reinterpret_cast<const char *>(buf), sizeof(T));
}

template <typename T>
T get_le(const char *p) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

ParamVector &ParamVector::operator+=(const ParamVector &other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ParamVector &ParamVector::operator-=(const ParamVector &other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ParamVector &ParamVector::operator*=(double s) {
  for (double &v : values_) v *= s;
  return *this;
}

ParamVector &ParamVector::axpy(double s, const ParamVector &other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
  return *this;
}

double ParamVector::dot(const ParamVector &other) const {
  require_same_size(*this, other);
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * other.values_[i];
  return acc;
}

double ParamVector::squared_norm() const { return dot(*this); }

double ParamVector::norm() const { return std::sqrt(squared_norm()); }

bool ParamVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ParamVector operator+(ParamVector a, const ParamVector &b) { return a += b; }
ParamVector operator-(ParamVector a, const ParamVector &b) { return a -= b; }
ParamVector operator*(double s, ParamVector a) { return a *= s; }

double cosine(const ParamVector &a, const ParamVector &b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

ParamVector coordinate_median(std::span<const ParamVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("coordinate_median: no vectors");
  const std::size_t dim = vectors.front().size();
  for (const auto &v : vectors) require_same_size(vectors.front(), v);
  ParamVector out(dim);
  std::vector<double> column(vectors.size());
  const std::size_t mid = column.size() / 2;
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < vectors.size(); ++i) column[i] = vectors[i][j];
    std::sort(column.begin(), column.end());
    out[j] = column.size() % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
  }
  return out;
}

std::string serialize(const ParamVector &p) {
  std::string out;
  out.reserve(8 + 8 * p.size());
  put_le<std::uint64_t>(out, p.size());
  for (double v : p.values()) put_le<double>(out, v);
  return out;
}

ParamVector deserialize(std::string_view bytes) {
  if (bytes.size() < 8) throw std::invalid_argument("ParamVector blob too short");
  const auto count = get_le<std::uint64_t>(bytes.data());
  if (bytes.size() != 8 + 8 * count) throw std::invalid_argument("ParamVector blob length mismatch");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = get_le<double>(bytes.data() + 8 + 8 * i);
  return ParamVector(std::move(values));
}

}  // namespace attrfl
