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

#ifndef ATTRFL_MODELS_HPP_
#define ATTRFL_MODELS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "attrfl/param_vector.hpp"
#include "attrfl/rng.hpp"

namespace attrfl {

enum class ModelKind { kLogistic, kMlp1 };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string &name);

// Architecture descriptor. Fixes the mapping from flat parameter index to
// weight/bias tensors:
//   logistic: W[C x D] row-major, b[C]
//   mlp1:     W1[H x D], b1[H], W2[C x H], b2[C]; tanh hidden activation
class ModelSpec {
 public:
  ModelSpec(ModelKind kind, std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes);

  static ModelSpec logistic(std::size_t input_dim, std::size_t num_classes) {
    return {ModelKind::kLogistic, input_dim, 0, num_classes};
  }
  static ModelSpec mlp1(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes) {
    return {ModelKind::kMlp1, input_dim, hidden_dim, num_classes};
  }

  ModelKind kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t param_count() const;

  // Flat index ranges of bias blocks, used by init and tests.
  std::vector<std::pair<std::size_t, std::size_t>> bias_ranges() const;

  bool operator==(const ModelSpec &) const = default;

 private:
  ModelKind kind_;
  std::size_t input_dim_;
  std::size_t hidden_dim_;
  std::size_t num_classes_;
};

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double &at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
};

struct LabeledBatch {
  Matrix inputs;
  std::vector<int> labels;

  LabeledBatch() = default;
  LabeledBatch(Matrix x, std::vector<int> y);

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return inputs.cols; }
  bool empty() const { return labels.empty(); }

  void append(std::span<const double> x, int y);
  LabeledBatch subset(std::span<const std::size_t> indices) const;

  bool operator==(const LabeledBatch &other) const {
    return inputs.rows == other.inputs.rows && inputs.cols == other.inputs.cols &&
           inputs.data == other.inputs.data && labels == other.labels;
  }
};

LabeledBatch concat(const LabeledBatch &a, const LabeledBatch &b);

struct LossAndGrad {
  double loss = 0.0;
  ParamVector grad;
};

struct SgdConfig {
  int epochs = 2;
  std::size_t batch_size = 32;
  double eta_w = 0.1;
};

ParamVector init_params(const ModelSpec &spec, Seed seed);

// Class probabilities, one row per sample.
Matrix forward(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &batch);

// Mean cross-entropy over the batch and its gradient w.r.t. params.
LossAndGrad loss_and_grad(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &batch);

// Argmax accuracy; ties go to the lowest class index.
double accuracy(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &batch);

// Mini-batch SGD with per-epoch reshuffling from a single seeded stream.
ParamVector sgd_train(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &data,
                      const SgdConfig &config, Seed seed);

}  // namespace attrfl

#endif  // ATTRFL_MODELS_HPP_
