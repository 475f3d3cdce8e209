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

#include "attrfl/flcore.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

namespace attrfl {

using json = nlohmann::ordered_json;

ParamVector weighted_aggregate(std::span<const ParamVector> updates, std::span<const std::size_t> n) {
  if (updates.empty()) throw std::invalid_argument("weighted_aggregate: no updates");
  if (updates.size() != n.size()) throw std::invalid_argument("weighted_aggregate: updates/counts length mismatch");
  const std::size_t total = std::accumulate(n.begin(), n.end(), std::size_t{0});
  if (total == 0) throw std::invalid_argument("weighted_aggregate: all counts are zero");
  ParamVector out(updates.front().size());
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (n[i] == 0) continue;
    out.axpy(static_cast<double>(n[i]) / static_cast<double>(total), updates[i]);
  }
  return out;
}

double utility(const ModelSpec &spec, const ParamVector &params, const LabeledBatch &test) {
  return accuracy(spec, params, test);
}

ParamVector benign_local_update(const ModelSpec &spec, const ParamVector &w_t, const ClientShard &shard,
                                const SgdConfig &sgd, Seed seed) {
  if (shard.data.empty()) throw std::invalid_argument("benign_local_update: empty shard");
  if (sgd.eta_w == 0.0) return ParamVector(w_t.size());
  return sgd_train(spec, w_t, shard.data, sgd, seed) - w_t;
}

ParamVector BenignBehavior::update(const ClientContext &ctx) {
  return benign_local_update(*ctx.spec, ctx.w_t(), *ctx.shard, ctx.sgd, ctx.train_seed);
}

Seed client_train_seed(Seed master, int client_id, int t) {
  return derive_seed(master, "train", static_cast<std::uint64_t>(client_id), static_cast<std::uint64_t>(t));
}

Seed client_behavior_seed(Seed master, int client_id, int t) {
  return derive_seed(master, "behavior", static_cast<std::uint64_t>(client_id), static_cast<std::uint64_t>(t));
}

Seed model_init_seed(Seed master) { return derive_seed(master, "model-init"); }

TrainingLog run_training(const FlSetup &setup, std::span<const std::unique_ptr<ClientBehavior>> behaviors) {
  if (setup.rounds < 1) throw std::invalid_argument("run_training: rounds must be >= 1");
  if (setup.shards.empty()) throw std::invalid_argument("run_training: no clients");
  if (behaviors.size() != setup.shards.size()) {
    throw std::invalid_argument("run_training: one behavior per client required");
  }
  if (setup.test.empty()) throw std::invalid_argument("run_training: empty test set");
  const bool defended = setup.defense.mode != DefenseMode::kOff;
  if (defended && setup.shards.size() < 2) throw std::invalid_argument("run_training: defense needs >= 2 clients");

  const std::size_t num_clients = setup.shards.size();
  TrainingLog log;
  log.fingerprint = setup.fingerprint;
  std::vector<ParamVector> history{init_params(setup.spec, model_init_seed(setup.master_seed))};
  log.initial_utility = utility(setup.spec, history.back(), setup.test);

  for (int t = 1; t <= setup.rounds; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.w_t = history.back();
    rec.client_ids.reserve(num_clients);
    for (std::size_t i = 0; i < num_clients; ++i) {
      const ClientShard &shard = setup.shards[i];
      ClientContext ctx;
      ctx.t = t;
      ctx.history = history;
      ctx.shard = &shard;
      ctx.spec = &setup.spec;
      ctx.sgd = setup.sgd;
      ctx.train_seed = client_train_seed(setup.master_seed, shard.client_id, t);
      ctx.behavior_seed = client_behavior_seed(setup.master_seed, shard.client_id, t);
      ParamVector u;
      try {
        u = behaviors[i]->update(ctx);
      } catch (const std::exception &e) {
        throw std::runtime_error("round " + std::to_string(t) + ", client " + std::to_string(shard.client_id) +
                                 " (" + behaviors[i]->name() + "): " + e.what());
      }
      if (u.size() != rec.w_t.size() || !u.all_finite()) {
        throw std::runtime_error("round " + std::to_string(t) + ", client " + std::to_string(shard.client_id) +
                                 ": malformed update");
      }
      rec.client_ids.push_back(shard.client_id);
      rec.updates.push_back(std::move(u));
      rec.n.push_back(shard.n());
    }

    rec.kept.assign(num_clients, true);
    if (defended) {
      TrimDecision local = trim_round(rec.updates, setup.defense.tau, t);
      std::vector<ParamVector> kept_updates;
      for (int pos : local.kept) kept_updates.push_back(rec.updates[static_cast<std::size_t>(pos)]);
      for (const auto &u : rec.updates) rec.plausibility.push_back(plausibility_distance(u, kept_updates));
      if (setup.defense.mode == DefenseMode::kEnforce) {
        for (int pos : local.trimmed) rec.kept[static_cast<std::size_t>(pos)] = false;
      }
      TrimDecision mapped;
      mapped.t = t;
      mapped.distances = local.distances;
      for (int pos : local.trimmed) mapped.trimmed.insert(rec.client_ids[static_cast<std::size_t>(pos)]);
      for (int pos : local.kept) mapped.kept.insert(rec.client_ids[static_cast<std::size_t>(pos)]);
      rec.trim = std::move(mapped);
    }

    std::vector<ParamVector> agg_updates;
    std::vector<std::size_t> agg_n;
    for (std::size_t i = 0; i < num_clients; ++i) {
      if (!rec.kept[i]) continue;
      agg_updates.push_back(rec.updates[i]);
      agg_n.push_back(rec.n[i]);
    }
    rec.w_next = rec.w_t + weighted_aggregate(agg_updates, agg_n);
    rec.test_utility_after = utility(setup.spec, rec.w_next, setup.test);
    history.push_back(rec.w_next);
    log.rounds.push_back(std::move(rec));
  }
  log.final_utility = log.rounds.back().test_utility_after;
  return log;
}

namespace {

json to_json(const ParamVector &p) { return json(p.values()); }

ParamVector param_from_json(const json &j) { return ParamVector(j.get<std::vector<double>>()); }

}  // namespace

void write_log(const std::filesystem::path &path, const TrainingLog &log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const auto &rec : log.rounds) {
    json j;
    j["t"] = rec.t;
    j["fingerprint"] = log.fingerprint;
    if (rec.t == 1) j["initial_utility"] = log.initial_utility;
    j["w_t"] = to_json(rec.w_t);
    j["client_ids"] = rec.client_ids;
    json ups = json::array();
    for (const auto &u : rec.updates) ups.push_back(to_json(u));
    j["updates"] = std::move(ups);
    j["n"] = rec.n;
    std::vector<int> kept(rec.kept.begin(), rec.kept.end());
    j["kept"] = kept;
    j["w_next"] = to_json(rec.w_next);
    j["test_utility_after"] = rec.test_utility_after;
    if (rec.trim) {
      j["trim"] = {{"distances", rec.trim->distances},
                   {"trimmed", std::vector<int>(rec.trim->trimmed.begin(), rec.trim->trimmed.end())}};
      j["plausibility"] = rec.plausibility;
    }
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TrainingLog read_log(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  TrainingLog log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    RoundRecord rec;
    rec.t = j.at("t").get<int>();
    log.fingerprint = j.at("fingerprint").get<std::string>();
    if (j.contains("initial_utility")) log.initial_utility = j["initial_utility"].get<double>();
    rec.w_t = param_from_json(j.at("w_t"));
    rec.client_ids = j.at("client_ids").get<std::vector<int>>();
    for (const auto &u : j.at("updates")) rec.updates.push_back(param_from_json(u));
    rec.n = j.at("n").get<std::vector<std::size_t>>();
    for (int k : j.at("kept").get<std::vector<int>>()) rec.kept.push_back(k != 0);
    rec.w_next = param_from_json(j.at("w_next"));
    rec.test_utility_after = j.at("test_utility_after").get<double>();
    if (j.contains("trim")) {
      TrimDecision d;
      d.t = rec.t;
      d.distances = j["trim"].at("distances").get<std::vector<double>>();
      for (int id : j["trim"].at("trimmed").get<std::vector<int>>()) d.trimmed.insert(id);
      for (int id : rec.client_ids) {
        if (!d.trimmed.count(id)) d.kept.insert(id);
      }
      rec.trim = std::move(d);
      rec.plausibility = j.at("plausibility").get<std::vector<double>>();
    }
    if (rec.t != static_cast<int>(log.rounds.size()) + 1) throw std::runtime_error("read_log: rounds not consecutive");
    log.rounds.push_back(std::move(rec));
  }
  if (!log.rounds.empty()) log.final_utility = log.rounds.back().test_utility_after;
  return log;
}

}  // namespace attrfl
