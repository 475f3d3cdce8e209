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

#ifndef ATTRFL_TESTS_FIXTURES_HPP_
#define ATTRFL_TESTS_FIXTURES_HPP_

#include <memory>
#include <random>
#include <vector>

#include "attrfl/data.hpp"
#include "attrfl/flcore.hpp"
#include "attrfl/models.hpp"
#include "attrfl/rng.hpp"

namespace attrfl::testing {

inline LabeledBatch random_batch(std::size_t rows, std::size_t dim, std::size_t classes, Rng &rng) {
  Matrix x(rows, dim);
  for (double &v : x.data) v = standard_normal(rng);
  std::vector<int> y(rows);
  for (int &v : y) v = static_cast<int>(uniform_index(rng, classes));
  return {std::move(x), std::move(y)};
}

inline ParamVector random_params(std::size_t size, Rng &rng, double scale = 1.0) {
  ParamVector p(size);
  for (std::size_t i = 0; i < size; ++i) p[i] = scale * standard_normal(rng);
  return p;
}

inline DatasetSpec blobs(std::size_t classes, std::size_t dim, double separation, Seed seed,
                         std::size_t per_class = 200) {
  DatasetSpec ds;
  ds.num_classes = classes;
  ds.input_dim = dim;
  ds.class_separation = separation;
  ds.samples_per_class = per_class;
  ds.seed = seed;
  return ds;
}

// Small benign federation on well-separated blobs.
inline FlSetup small_setup(std::size_t clients, std::size_t classes, std::size_t k, int rounds, Seed seed) {
  const Dataset data = synthesize(blobs(classes, 4, 4.0, seed));
  PartitionSpec ps;
  ps.num_clients = clients;
  ps.classes_per_client = k;
  ps.samples_per_client = 60;
  ps.seed = seed + 1;
  FlSetup setup;
  setup.spec = ModelSpec::logistic(4, classes);
  setup.rounds = rounds;
  setup.master_seed = seed;
  setup.test = data.test;
  setup.shards = partition_noniid(data.train, classes, ps);
  return setup;
}

inline std::vector<std::unique_ptr<ClientBehavior>> benign_clients(std::size_t n) {
  std::vector<std::unique_ptr<ClientBehavior>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::make_unique<BenignBehavior>());
  return out;
}

}  // namespace attrfl::testing

#endif  // ATTRFL_TESTS_FIXTURES_HPP_
