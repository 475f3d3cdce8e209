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

#ifndef ATTRFL_FLCORE_HPP_
#define ATTRFL_FLCORE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attrfl/data.hpp"
#include "attrfl/defense.hpp"
#include "attrfl/models.hpp"
#include "attrfl/param_vector.hpp"
#include "attrfl/rng.hpp"

namespace attrfl {

struct RoundRecord {
  int t = 0;
  ParamVector w_t;
  // Client ids in reporting order; updates/n/kept are indexed alike.
  std::vector<int> client_ids;
  std::vector<ParamVector> updates;
  std::vector<std::size_t> n;
  // False for clients trimmed by an enforcing defense.
  std::vector<bool> kept;
  ParamVector w_next;
  double test_utility_after = 0.0;
  // Present whenever a defense ran (monitor or enforce); ids are client ids.
  std::optional<TrimDecision> trim;
  std::vector<double> plausibility;
};

struct TrainingLog {
  std::vector<RoundRecord> rounds;
  double initial_utility = 0.0;
  double final_utility = 0.0;
  std::string fingerprint;
};

// Sum_i (n_i / sum_j n_j) * g_i.
ParamVector weighted_aggregate(std::span<const ParamVector> updates, std::span<const std::size_t> n);

double utility(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &test);

// What a client sees when asked for an update. `history` holds the broadcast
// models w_1..w_t only; other clients' data and updates are not reachable.
struct ClientContext {
  int t = 1;
  std::span<const ParamVector> history;
  const ClientShard *shard = nullptr;
  const ModelSpec *spec = nullptr;
  SgdConfig sgd;
  // Stream for local SGD; shared by every behavior of the same client so
  // benign training is paired across attacked and clean runs.
  Seed train_seed = 0;
  // Stream for behavior-specific randomness (noise, latents, targets).
  Seed behavior_seed = 0;

  const ParamVector &w_t() const { return history.back(); }
};

class ClientBehavior {
 public:
  virtual ~ClientBehavior() = default;
  virtual std::string name() const = 0;
  virtual ParamVector update(const ClientContext &ctx) = 0;
};

// sgd_train(w_t, shard) - w_t; eta_w == 0 short-circuits to a zero update.
ParamVector benign_local_update(const ModelSpec &spec, const ParamVector &w_t, const ClientShard &shard,
                                const SgdConfig &sgd, Seed seed);

class BenignBehavior : public ClientBehavior {
 public:
  std::string name() const override { return "attack_free"; }
  ParamVector update(const ClientContext &ctx) override;
};

struct FlSetup {
  ModelSpec spec = ModelSpec::logistic(1, 2);
  SgdConfig sgd;
  int rounds = 15;
  Seed master_seed = 0;
  LabeledBatch test;
  std::vector<ClientShard> shards;
  DefenseConfig defense;
  std::string fingerprint;
};

// Round-sequential FedAvg with full participation. behaviors[i] acts for
// shards[i]. A throwing client aborts the run with the round attached.
TrainingLog run_training(const FlSetup &setup, std::span<const std::unique_ptr<ClientBehavior>> behaviors);

Seed client_train_seed(Seed master, int client_id, int t);
Seed client_behavior_seed(Seed master, int client_id, int t);
Seed model_init_seed(Seed master);

// One JSON object per line, one line per round.
void write_log(const std::filesystem::path &path, const TrainingLog &log);
TrainingLog read_log(const std::filesystem::path &path);

}  // namespace attrfl

#endif  // ATTRFL_FLCORE_HPP_
