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

#include "attrfl/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace attrfl {

std::string to_string(ModelKind kind) { return kind == ModelKind::kLogistic ? "logistic" : "mlp1"; }

ModelKind parse_model_kind(const std::string &name) {
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "mlp1") return ModelKind::kMlp1;
  throw std::invalid_argument("unknown model kind: " + name);
}

ModelSpec::ModelSpec(ModelKind kind, std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes)
    : kind_(kind), input_dim_(input_dim), hidden_dim_(hidden_dim), num_classes_(num_classes) {
  if (input_dim_ == 0) throw std::invalid_argument("ModelSpec: input_dim must be positive");
  if (num_classes_ < 2) throw std::invalid_argument("ModelSpec: num_classes must be >= 2");
  if (kind_ == ModelKind::kMlp1 && hidden_dim_ == 0) {
    throw std::invalid_argument("ModelSpec: mlp1 requires hidden_dim > 0");
  }
  if (kind_ == ModelKind::kLogistic && hidden_dim_ != 0) {
    throw std::invalid_argument("ModelSpec: logistic requires hidden_dim == 0");
  }
}

std::size_t ModelSpec::param_count() const {
  if (kind_ == ModelKind::kLogistic) return num_classes_ * input_dim_ + num_classes_;
  return hidden_dim_ * input_dim_ + hidden_dim_ + num_classes_ * hidden_dim_ + num_classes_;
}

std::vector<std::pair<std::size_t, std::size_t>> ModelSpec::bias_ranges() const {
  const std::size_t C = num_classes_, D = input_dim_, H = hidden_dim_;
  if (kind_ == ModelKind::kLogistic) return {{C * D, C * D + C}};
  const std::size_t b1 = H * D;
  const std::size_t b2 = b1 + H + C * H;
  return {{b1, b1 + H}, {b2, b2 + C}};
}

LabeledBatch::LabeledBatch(Matrix x, std::vector<int> y) : inputs(std::move(x)), labels(std::move(y)) {
  if (inputs.rows != labels.size()) {
    throw std::invalid_argument("LabeledBatch: row count " + std::to_string(inputs.rows) +
                                " != label count " + std::to_string(labels.size()));
  }
  for (double v : inputs.data) {
    if (!std::isfinite(v)) throw std::invalid_argument("LabeledBatch: non-finite input");
  }
}

void LabeledBatch::append(std::span<const double> x, int y) {
  if (inputs.rows == 0 && inputs.cols == 0) inputs.cols = x.size();
  if (x.size() != inputs.cols) throw std::invalid_argument("LabeledBatch::append: dimension mismatch");
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("LabeledBatch: non-finite input");
  }
  inputs.data.insert(inputs.data.end(), x.begin(), x.end());
  ++inputs.rows;
  labels.push_back(y);
}

LabeledBatch LabeledBatch::subset(std::span<const std::size_t> indices) const {
  LabeledBatch out;
  out.inputs = Matrix(indices.size(), inputs.cols);
  out.labels.resize(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto src = inputs.row(indices[k]);
    std::copy(src.begin(), src.end(), out.inputs.row(k).begin());
    out.labels[k] = labels[indices[k]];
  }
  return out;
}

LabeledBatch concat(const LabeledBatch &a, const LabeledBatch &b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.dim() != b.dim()) throw std::invalid_argument("concat: dimension mismatch");
  LabeledBatch out = a;
  out.inputs.data.insert(out.inputs.data.end(), b.inputs.data.begin(), b.inputs.data.end());
  out.inputs.rows += b.inputs.rows;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

namespace {

void check_dims(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &batch) {
  if (params.size() != spec.param_count()) {
    throw std::invalid_argument("parameter count " + std::to_string(params.size()) + " != spec " +
                                std::to_string(spec.param_count()));
  }
  if (!batch.empty() && batch.dim() != spec.input_dim()) {
    throw std::invalid_argument("batch input_dim " + std::to_string(batch.dim()) + " != spec " +
                                std::to_string(spec.input_dim()));
  }
  for (int y : batch.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= spec.num_classes()) {
      throw std::invalid_argument("label out of range: " + std::to_string(y));
    }
  }
}

// Logits for one sample; `hidden` receives tanh activations for mlp1.
void sample_logits(const ModelSpec &spec, const ParamVector &p, std::span<const double> x,
                   std::vector<double> &hidden, std::vector<double> &logits) {
  const std::size_t C = spec.num_classes(), D = spec.input_dim(), H = spec.hidden_dim();
  logits.assign(C, 0.0);
  if (spec.kind() == ModelKind::kLogistic) {
    const std::size_t b = C * D;
    for (std::size_t c = 0; c < C; ++c) {
      double acc = p[b + c];
      const std::size_t row = c * D;
      for (std::size_t d = 0; d < D; ++d) acc += p[row + d] * x[d];
      logits[c] = acc;
    }
    return;
  }
  const std::size_t b1 = H * D, w2 = b1 + H, b2 = w2 + C * H;
  hidden.assign(H, 0.0);
  for (std::size_t h = 0; h < H; ++h) {
    double acc = p[b1 + h];
    const std::size_t row = h * D;
    for (std::size_t d = 0; d < D; ++d) acc += p[row + d] * x[d];
    hidden[h] = std::tanh(acc);
  }
  for (std::size_t c = 0; c < C; ++c) {
    double acc = p[b2 + c];
    const std::size_t row = w2 + c * H;
    for (std::size_t h = 0; h < H; ++h) acc += p[row + h] * hidden[h];
    logits[c] = acc;
  }
}

// In-place softmax; returns log-sum-exp of the input logits.
double softmax_inplace(std::vector<double> &v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double &x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double &x : v) x /= sum;
  return mx + std::log(sum);
}

}  // namespace

ParamVector init_params(const ModelSpec &spec, Seed seed) {
  Rng rng(seed);
  ParamVector p(spec.param_count());
  const std::size_t C = spec.num_classes(), D = spec.input_dim(), H = spec.hidden_dim();
  auto fill = [&](std::size_t begin, std::size_t count, std::size_t fan_in) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = begin; i < begin + count; ++i) p[i] = scale * standard_normal(rng);
  };
  if (spec.kind() == ModelKind::kLogistic) {
    fill(0, C * D, D);
  } else {
    fill(0, H * D, D);
    fill(H * D + H, C * H, H);
  }
  return p;
}

Matrix forward(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &batch) {
  check_dims(spec, params, batch);
  Matrix probs(batch.size(), spec.num_classes());
  std::vector<double> hidden, logits;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sample_logits(spec, params, batch.inputs.row(i), hidden, logits);
    softmax_inplace(logits);
    std::copy(logits.begin(), logits.end(), probs.row(i).begin());
  }
  return probs;
}

LossAndGrad loss_and_grad(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &batch) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
  check_dims(spec, params, batch);
  const std::size_t C = spec.num_classes(), D = spec.input_dim(), H = spec.hidden_dim();
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  LossAndGrad out{0.0, ParamVector(params.size())};
  ParamVector &g = out.grad;
  std::vector<double> hidden, logits, dhidden(H);

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto x = batch.inputs.row(i);
    const auto y = static_cast<std::size_t>(batch.labels[i]);
    sample_logits(spec, params, x, hidden, logits);
    const double z_y = logits[y];
    const double lse = softmax_inplace(logits);
    out.loss += (lse - z_y) * inv_n;
    // logits now holds probabilities; turn into dL/dz scaled by 1/n.
    logits[y] -= 1.0;
    for (double &v : logits) v *= inv_n;

    if (spec.kind() == ModelKind::kLogistic) {
      const std::size_t b = C * D;
      for (std::size_t c = 0; c < C; ++c) {
        const double dz = logits[c];
        const std::size_t row = c * D;
        for (std::size_t d = 0; d < D; ++d) g[row + d] += dz * x[d];
        g[b + c] += dz;
      }
      continue;
    }

    const std::size_t b1 = H * D, w2 = b1 + H, b2 = w2 + C * H;
    std::fill(dhidden.begin(), dhidden.end(), 0.0);
    for (std::size_t c = 0; c < C; ++c) {
      const double dz = logits[c];
      const std::size_t row = w2 + c * H;
      for (std::size_t h = 0; h < H; ++h) {
        g[row + h] += dz * hidden[h];
        dhidden[h] += params[row + h] * dz;
      }
      g[b2 + c] += dz;
    }
    for (std::size_t h = 0; h < H; ++h) {
      const double da = dhidden[h] * (1.0 - hidden[h] * hidden[h]);
      const std::size_t row = h * D;
      for (std::size_t d = 0; d < D; ++d) g[row + d] += da * x[d];
      g[b1 + h] += da;
    }
  }
  return out;
}

double accuracy(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &batch) {
  if (batch.empty()) throw std::invalid_argument("accuracy: empty batch");
  check_dims(spec, params, batch);
  std::vector<double> hidden, logits;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sample_logits(spec, params, batch.inputs.row(i), hidden, logits);
    // max_element returns the first maximum: lowest index wins ties.
    const auto pred = static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (pred == batch.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

ParamVector sgd_train(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &data,
                      const SgdConfig &config, Seed seed) {
  if (config.epochs < 1) throw std::invalid_argument("sgd_train: epochs must be >= 1");
  if (config.batch_size < 1) throw std::invalid_argument("sgd_train: batch_size must be >= 1");
  if (!(config.eta_w > 0.0) || !std::isfinite(config.eta_w)) {
    throw std::invalid_argument("sgd_train: eta_w must be positive and finite");
  }
  if (data.empty()) throw std::invalid_argument("sgd_train: empty dataset");

  Rng rng(seed);
  ParamVector w = params;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      const auto lg = loss_and_grad(spec, w, data.subset(idx));
      w.axpy(-config.eta_w, lg.grad);
    }
  }
  return w;
}

}  // namespace attrfl
