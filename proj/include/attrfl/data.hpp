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

#ifndef ATTRFL_DATA_HPP_
#define ATTRFL_DATA_HPP_

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "attrfl/models.hpp"
#include "attrfl/rng.hpp"

namespace attrfl {

enum class Generator { kGaussianBlobs, kConcentricRings };

std::string to_string(Generator g);
Generator parse_generator(const std::string &name);

struct DatasetSpec {
  Generator generator = Generator::kGaussianBlobs;
  std::size_t num_classes = 10;
  std::size_t input_dim = 10;
  std::size_t samples_per_class = 500;
  double class_separation = 3.0;
  double noise_scale = 1.0;
  Seed seed = 0;

  void validate() const;
};

struct ClientShard {
  int client_id = 0;
  LabeledBatch data;
  std::vector<std::size_t> class_counts;
  // Row indices into the training set this shard was drawn from.
  std::vector<std::size_t> source_rows;

  std::size_t n() const { return data.size(); }
};

struct PartitionSpec {
  std::size_t num_clients = 10;
  std::size_t classes_per_client = 3;
  std::size_t samples_per_client = 300;
  Seed seed = 0;

  void validate(std::size_t num_classes) const;
};

struct Dataset {
  LabeledBatch train;
  LabeledBatch test;
};

// Class-balanced train/test split; the test split takes one fifth of the
// samples of every class.
Dataset synthesize(const DatasetSpec &spec);

// Fresh samples from the same class geometry as synthesize(spec), drawn
// from an independent stream.
LabeledBatch sample_pool(const DatasetSpec &spec, std::size_t per_class, Seed draw_seed);

// Non-IID class-imbalanced partition. Client i holds the classes at
// positions i*k .. i*k+k-1 (mod C) of a seeded class permutation, with
// seeded per-class proportions in [0.75, 1.25] of an even split.
std::vector<ClientShard> partition_noniid(const LabeledBatch &train, std::size_t num_classes,
                                          const PartitionSpec &spec);

struct CoverageStats {
  std::set<int> missing;
  // Nonzero classes whose count is strictly below the median nonzero count.
  std::set<int> underrepresented;
};

CoverageStats coverage_stats(const ClientShard &shard, std::size_t num_classes);
CoverageStats coverage_stats(const std::vector<std::size_t> &class_counts);

std::vector<std::size_t> class_counts(const LabeledBatch &batch, std::size_t num_classes);

// One row per sample: client_id, label, features...
void write_shards_csv(const std::filesystem::path &path, const std::vector<ClientShard> &shards);

}  // namespace attrfl

#endif  // ATTRFL_DATA_HPP_
