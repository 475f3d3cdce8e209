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

#include "attrfl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace attrfl::oracles {

std::vector<double> shapley_bruteforce(std::span<const double> table, std::size_t num_players) {
  if (num_players > kMaxBruteforcePlayers) throw std::length_error("shapley_bruteforce: too many players");
  if (table.size() != (std::size_t{1} << num_players)) throw std::invalid_argument("shapley_bruteforce: table size");
  std::vector<std::size_t> order(num_players);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(num_players, 0.0);
  double count = 0.0;
  do {
    std::size_t mask = 0;
    for (std::size_t p : order) {
      const std::size_t next = mask | (std::size_t{1} << p);
      phi[p] += table[next] - table[mask];
      mask = next;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double &v : phi) v /= count;
  return phi;
}

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)> &f, std::span<const double> x,
                                double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double reference_accuracy(const ModelSpec &spec, std::span<const double> params, const LabeledBatch &test) {
  const std::size_t C = spec.num_classes(), D = spec.input_dim(), H = spec.hidden_dim();
  std::size_t correct = 0;
  for (std::size_t r = 0; r < test.size(); ++r) {
    const auto x = test.inputs.row(r);
    std::vector<double> feat(x.begin(), x.end());
    std::size_t in = D;
    std::size_t off = 0;
    if (spec.kind() == ModelKind::kMlp1) {
      std::vector<double> h(H);
      for (std::size_t j = 0; j < H; ++j) {
        double a = params[H * D + j];
        for (std::size_t d = 0; d < D; ++d) a += params[j * D + d] * feat[d];
        h[j] = std::tanh(a);
      }
      feat = std::move(h);
      in = H;
      off = H * D + H;
    }
    int best = 0;
    double best_val = -INFINITY;
    for (std::size_t c = 0; c < C; ++c) {
      double z = params[off + C * in + c];
      for (std::size_t d = 0; d < in; ++d) z += params[off + c * in + d] * feat[d];
      if (z > best_val) {
        best_val = z;
        best = static_cast<int>(c);
      }
    }
    if (best == test.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::vector<double> loo_recompute(const TrainingLog &log, const ModelSpec &spec, const LabeledBatch &test) {
  if (log.rounds.empty()) throw std::invalid_argument("loo_recompute: empty log");
  const std::size_t N = log.rounds.front().updates.size();
  std::vector<double> out(N, 0.0);
  for (const auto &rec : log.rounds) {
    const std::size_t P = rec.w_t.size();
    auto score_without = [&](std::size_t skip) {
      std::vector<double> w(rec.w_t.values());
      double total = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        if (i != skip && (rec.kept.empty() || rec.kept[i])) total += static_cast<double>(rec.n[i]);
      }
      if (total > 0.0) {
        for (std::size_t i = 0; i < N; ++i) {
          if (i == skip || !(rec.kept.empty() || rec.kept[i])) continue;
          const double weight = static_cast<double>(rec.n[i]) / total;
          for (std::size_t p = 0; p < P; ++p) w[p] += weight * rec.updates[i][p];
        }
      }
      return reference_accuracy(spec, w, test);
    };
    const double all = score_without(N);
    for (std::size_t i = 0; i < N; ++i) {
      if (!rec.kept.empty() && !rec.kept[i]) continue;
      out[i] += all - score_without(i);
    }
  }
  return out;
}

}  // namespace attrfl::oracles
