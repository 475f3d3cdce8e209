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

#include "attrfl/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "attrfl/format.hpp"

namespace attrfl {

std::string to_string(Generator g) {
  return g == Generator::kGaussianBlobs ? "gaussian_blobs" : "concentric_rings";
}

Generator parse_generator(const std::string &name) {
  if (name == "gaussian_blobs") return Generator::kGaussianBlobs;
  if (name == "concentric_rings") return Generator::kConcentricRings;
  throw std::invalid_argument("unknown dataset generator: " + name);
}

void DatasetSpec::validate() const {
  if (num_classes < 2) throw std::invalid_argument("DatasetSpec: num_classes must be >= 2");
  if (samples_per_class < 1) throw std::invalid_argument("DatasetSpec: samples_per_class must be >= 1");
  if (input_dim < 1) throw std::invalid_argument("DatasetSpec: input_dim must be >= 1");
  if (generator == Generator::kConcentricRings && input_dim < 2) {
    throw std::invalid_argument("DatasetSpec: concentric_rings needs input_dim >= 2");
  }
  if (!(class_separation > 0.0)) throw std::invalid_argument("DatasetSpec: class_separation must be positive");
  if (!(noise_scale > 0.0)) throw std::invalid_argument("DatasetSpec: noise_scale must be positive");
}

void PartitionSpec::validate(std::size_t num_classes) const {
  if (num_clients < 2) throw std::invalid_argument("PartitionSpec: num_clients must be >= 2");
  if (classes_per_client < 1 || classes_per_client > num_classes) {
    throw std::invalid_argument("PartitionSpec: classes_per_client must be in [1, C]");
  }
  if (samples_per_client < classes_per_client) {
    throw std::invalid_argument("PartitionSpec: samples_per_client must be >= classes_per_client");
  }
}

namespace {

std::vector<std::vector<double>> class_means(const DatasetSpec &spec, Rng &rng) {
  std::vector<std::vector<double>> means(spec.num_classes, std::vector<double>(spec.input_dim, 0.0));
  if (spec.generator != Generator::kGaussianBlobs) return means;
  for (auto &mu : means) {
    double sq = 0.0;
    for (double &v : mu) {
      v = standard_normal(rng);
      sq += v * v;
    }
    const double scale = spec.class_separation / std::sqrt(sq);
    for (double &v : mu) v *= scale;
  }
  return means;
}

void draw_sample(const DatasetSpec &spec, const std::vector<double> &mean, std::size_t c, Rng &rng,
                 std::vector<double> &x) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (std::size_t d = 0; d < spec.input_dim; ++d) x[d] = mean[d] + spec.noise_scale * standard_normal(rng);
  if (spec.generator == Generator::kConcentricRings) {
    const double r = static_cast<double>(c + 1) * spec.class_separation;
    const double a = angle(rng);
    x[0] += r * std::cos(a);
    x[1] += r * std::sin(a);
  }
}

}  // namespace

Dataset synthesize(const DatasetSpec &spec) {
  spec.validate();
  const std::size_t C = spec.num_classes, D = spec.input_dim;
  Rng rng = make_rng(spec.seed, "dataset");
  const auto means = class_means(spec, rng);

  const std::size_t n_test = spec.samples_per_class / 5;
  const std::size_t n_train = spec.samples_per_class - n_test;
  Dataset out;
  out.train.inputs = Matrix(0, D);
  out.test.inputs = Matrix(0, D);
  std::vector<double> x(D);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
      draw_sample(spec, means[c], c, rng, x);
      (s < n_train ? out.train : out.test).append(x, static_cast<int>(c));
    }
  }
  return out;
}

LabeledBatch sample_pool(const DatasetSpec &spec, std::size_t per_class, Seed draw_seed) {
  spec.validate();
  Rng geometry = make_rng(spec.seed, "dataset");
  const auto means = class_means(spec, geometry);
  Rng rng(draw_seed);
  LabeledBatch out;
  out.inputs = Matrix(0, spec.input_dim);
  std::vector<double> x(spec.input_dim);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t s = 0; s < per_class; ++s) {
      draw_sample(spec, means[c], c, rng, x);
      out.append(x, static_cast<int>(c));
    }
  }
  return out;
}

std::vector<std::size_t> class_counts(const LabeledBatch &batch, std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int y : batch.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) throw std::invalid_argument("label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

namespace {

// Largest-remainder apportionment of `total` by `weights`.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double> &weights) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / wsum;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[remainders[k % remainders.size()].second];
  return out;
}

}  // namespace

std::vector<ClientShard> partition_noniid(const LabeledBatch &train, std::size_t num_classes,
                                          const PartitionSpec &spec) {
  spec.validate(num_classes);
  const std::size_t N = spec.num_clients, k = spec.classes_per_client, C = num_classes;

  Rng rng = make_rng(spec.seed, "partition");
  std::vector<std::size_t> class_order(C);
  std::iota(class_order.begin(), class_order.end(), std::size_t{0});
  std::shuffle(class_order.begin(), class_order.end(), rng);

  std::vector<std::vector<std::size_t>> pools(C);
  for (std::size_t r = 0; r < train.size(); ++r) {
    const int y = train.labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= C) throw std::invalid_argument("partition: label out of range");
    pools[static_cast<std::size_t>(y)].push_back(r);
  }
  for (auto &pool : pools) std::shuffle(pool.begin(), pool.end(), rng);

  std::uniform_real_distribution<double> skew(0.75, 1.25);
  std::vector<std::size_t> cursor(C, 0);
  std::vector<ClientShard> shards(N);
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<std::size_t> classes(k);
    std::vector<double> weights(k);
    for (std::size_t j = 0; j < k; ++j) {
      classes[j] = class_order[(i * k + j) % C];
      weights[j] = skew(rng);
    }
    const auto portions = apportion(spec.samples_per_client, weights);

    ClientShard &shard = shards[i];
    shard.client_id = static_cast<int>(i);
    shard.class_counts.assign(C, 0);
    shard.data.inputs = Matrix(0, train.dim());
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t c = classes[j];
      if (cursor[c] + portions[j] > pools[c].size()) {
        throw std::invalid_argument(format("partition infeasible: class %zu exhausted (%zu available, client %zu wants %zu more)",
                                           c, pools[c].size(), i, portions[j]));
      }
      for (std::size_t s = 0; s < portions[j]; ++s) {
        const std::size_t row = pools[c][cursor[c]++];
        shard.source_rows.push_back(row);
        shard.data.append(train.inputs.row(row), train.labels[row]);
      }
      shard.class_counts[c] = portions[j];
    }
  }
  return shards;
}

CoverageStats coverage_stats(const std::vector<std::size_t> &counts) {
  CoverageStats out;
  std::vector<std::size_t> nonzero;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      out.missing.insert(static_cast<int>(c));
    } else {
      nonzero.push_back(counts[c]);
    }
  }
  if (nonzero.empty()) return out;
  std::sort(nonzero.begin(), nonzero.end());
  const std::size_t m = nonzero.size() / 2;
  const double median = nonzero.size() % 2 == 1 ? static_cast<double>(nonzero[m])
                                                 : 0.5 * static_cast<double>(nonzero[m - 1] + nonzero[m]);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0 && static_cast<double>(counts[c]) < median) out.underrepresented.insert(static_cast<int>(c));
  }
  return out;
}

CoverageStats coverage_stats(const ClientShard &shard, std::size_t num_classes) {
  if (shard.class_counts.size() != num_classes) return coverage_stats(class_counts(shard.data, num_classes));
  return coverage_stats(shard.class_counts);
}

void write_shards_csv(const std::filesystem::path &path, const std::vector<ClientShard> &shards) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  const std::size_t dim = shards.empty() ? 0 : shards.front().data.dim();
  out << "client_id,label";
  for (std::size_t d = 0; d < dim; ++d) out << ",x" << d;
  out << '\n';
  for (const auto &shard : shards) {
    for (std::size_t r = 0; r < shard.n(); ++r) {
      out << shard.client_id << ',' << shard.data.labels[r];
      for (double v : shard.data.inputs.row(r)) out << ',' << format_double(v);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace attrfl
