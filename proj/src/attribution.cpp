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

#include "attrfl/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "attrfl/format.hpp"

namespace attrfl {

std::string to_string(Evaluator e) {
  switch (e) {
    case Evaluator::kFedsvExact:
      return "fedsv_exact";
    case Evaluator::kFedsvMc:
      return "fedsv_mc";
    case Evaluator::kLooRound:
      return "loo_round";
    case Evaluator::kLooRetrain:
      return "loo_retrain";
  }
  return "fedsv_exact";
}

Evaluator parse_evaluator(const std::string &name) {
  if (name == "fedsv_exact" || name == "fedsv") return Evaluator::kFedsvExact;
  if (name == "fedsv_mc") return Evaluator::kFedsvMc;
  if (name == "loo_round" || name == "loo") return Evaluator::kLooRound;
  if (name == "loo_retrain") return Evaluator::kLooRetrain;
  throw std::invalid_argument("unknown evaluator: " + name);
}

CoalitionUtility::CoalitionUtility(ParamVector base_w, std::vector<ParamVector> updates, std::vector<std::size_t> n,
                                   const ModelSpec &spec, const LabeledBatch &test)
    : base_w_(std::move(base_w)), updates_(std::move(updates)), n_(std::move(n)), spec_(&spec), test_(&test) {
  if (updates_.size() != n_.size()) throw std::invalid_argument("CoalitionUtility: updates/counts mismatch");
  if (updates_.size() > 63) throw std::invalid_argument("CoalitionUtility: too many players for a bitmask");
}

CoalitionUtility CoalitionUtility::from_round(const RoundRecord &rec, const ModelSpec &spec, const LabeledBatch &test) {
  std::vector<ParamVector> updates;
  std::vector<std::size_t> n;
  for (std::size_t i = 0; i < rec.updates.size(); ++i) {
    if (!rec.kept.empty() && !rec.kept[i]) continue;
    updates.push_back(rec.updates[i]);
    n.push_back(rec.n[i]);
  }
  return {rec.w_t, std::move(updates), std::move(n), spec, test};
}

double CoalitionUtility::value(std::uint64_t mask) const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < updates_.size(); ++i) {
    if (mask >> i & 1U) total += n_[i];
  }
  // A coalition carrying no data leaves the model at w_t.
  if (total == 0) return utility(*spec_, base_w_, *test_);
  ParamVector w = base_w_;
  for (std::size_t i = 0; i < updates_.size(); ++i) {
    if ((mask >> i & 1U) && n_[i] > 0) w.axpy(static_cast<double>(n_[i]) / static_cast<double>(total), updates_[i]);
  }
  return utility(*spec_, w, *test_);
}

CoalitionValueFn CoalitionUtility::as_function() const {
  return [this](std::uint64_t mask) { return value(mask); };
}

double coalition_value(const CoalitionUtility &cu, std::span<const int> subset) {
  std::uint64_t mask = 0;
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= cu.num_players()) {
      throw std::invalid_argument("coalition_value: player out of range");
    }
    mask |= std::uint64_t{1} << i;
  }
  return cu.value(mask);
}

std::vector<double> shapley_exact(std::size_t num_players, const CoalitionValueFn &v) {
  if (num_players > kMaxExactPlayers) {
    throw std::length_error(format("shapley_exact: %zu players exceeds the enumeration limit of %zu; use shapley_mc",
                                   num_players, kMaxExactPlayers));
  }
  const std::size_t n = num_players;
  const std::uint64_t full = std::uint64_t{1} << n;
  std::vector<double> table(full);
  for (std::uint64_t mask = 0; mask < full; ++mask) table[mask] = v(mask);

  // weight[s] = s! (n - s - 1)! / n!
  std::vector<double> weight(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double w = 1.0 / static_cast<double>(n);
    // Multiply by 1 / C(n-1, s) incrementally.
    for (std::size_t k = 1; k <= s; ++k) w *= static_cast<double>(k) / static_cast<double>(n - k);
    weight[s] = w;
  }

  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < full; ++mask) {
      if (mask & bit) continue;
      acc += weight[static_cast<std::size_t>(std::popcount(mask))] * (table[mask | bit] - table[mask]);
    }
    phi[i] = acc;
  }
  return phi;
}

std::vector<double> shapley_exact(const CoalitionUtility &cu) { return shapley_exact(cu.num_players(), cu.as_function()); }

std::vector<double> shapley_mc(std::size_t num_players, const CoalitionValueFn &v, std::size_t num_permutations,
                               Seed seed) {
  if (num_permutations < 1) throw std::invalid_argument("shapley_mc: num_permutations must be >= 1");
  if (num_players > 63) throw std::invalid_argument("shapley_mc: too many players");
  std::unordered_map<std::uint64_t, double> cache;
  auto value = [&](std::uint64_t mask) {
    auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    const double val = v(mask);
    cache.emplace(mask, val);
    return val;
  };

  Rng rng(seed);
  std::vector<int> order(num_players);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(num_players, 0.0);
  for (std::size_t p = 0; p < num_permutations; ++p) {
    std::shuffle(order.begin(), order.end(), rng);
    std::uint64_t mask = 0;
    double prev = value(mask);
    for (int i : order) {
      mask |= std::uint64_t{1} << i;
      const double cur = value(mask);
      phi[static_cast<std::size_t>(i)] += cur - prev;
      prev = cur;
    }
  }
  for (double &x : phi) x /= static_cast<double>(num_permutations);
  return phi;
}

std::vector<double> shapley_mc(const CoalitionUtility &cu, std::size_t num_permutations, Seed seed) {
  return shapley_mc(cu.num_players(), cu.as_function(), num_permutations, seed);
}

std::size_t AttributionReport::index_of(int client_id) const {
  const auto it = std::find(client_ids.begin(), client_ids.end(), client_id);
  if (it == client_ids.end()) throw std::out_of_range("client not in report: " + std::to_string(client_id));
  return static_cast<std::size_t>(it - client_ids.begin());
}

std::vector<double> normalize_shares(std::span<const double> raw) {
  if (raw.empty()) throw std::invalid_argument("normalize_shares: empty input");
  const double lo = *std::min_element(raw.begin(), raw.end());
  std::vector<double> shifted(raw.size());
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    shifted[i] = raw[i] - lo;
    total += shifted[i];
  }
  if (!(total > 0.0)) return std::vector<double>(raw.size(), 1.0 / static_cast<double>(raw.size()));
  for (double &s : shifted) s /= total;
  return shifted;
}

std::vector<int> rank_clients(std::span<const double> shares) {
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return shares[a] > shares[b]; });
  std::vector<int> ranks(shares.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r) + 1;
  return ranks;
}

AttributionReport make_report(Evaluator e, std::vector<int> client_ids, std::vector<double> raw) {
  AttributionReport rep;
  rep.evaluator = e;
  rep.client_ids = std::move(client_ids);
  rep.raw = std::move(raw);
  rep.shares = normalize_shares(rep.raw);
  rep.ranks = rank_clients(rep.shares);
  return rep;
}

namespace {

void require_log(const TrainingLog &log) {
  if (log.rounds.empty()) throw std::invalid_argument("attribution: empty training log");
  for (const auto &rec : log.rounds) {
    if (rec.client_ids != log.rounds.front().client_ids) {
      throw std::invalid_argument("attribution: client set changes between rounds");
    }
  }
}

// Positions of players (kept clients) inside the round's client list.
std::vector<std::size_t> player_positions(const RoundRecord &rec) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < rec.updates.size(); ++i) {
    if (rec.kept.empty() || rec.kept[i]) pos.push_back(i);
  }
  return pos;
}

}  // namespace

AttributionReport fedsv(const TrainingLog &log, const ModelSpec &spec, const LabeledBatch &test,
                        const FedsvOptions &options) {
  require_log(log);
  const auto &ids = log.rounds.front().client_ids;
  std::vector<double> total(ids.size(), 0.0);
  for (const auto &rec : log.rounds) {
    const auto cu = CoalitionUtility::from_round(rec, spec, test);
    const auto players = player_positions(rec);
    const auto phi = options.exact
                         ? shapley_exact(cu)
                         : shapley_mc(cu, options.mc_permutations,
                                      derive_seed(options.seed, "fedsv-mc", 0, static_cast<std::uint64_t>(rec.t)));
    for (std::size_t p = 0; p < players.size(); ++p) total[players[p]] += phi[p];
  }
  return make_report(options.exact ? Evaluator::kFedsvExact : Evaluator::kFedsvMc, ids, std::move(total));
}

AttributionReport loo_round(const TrainingLog &log, const ModelSpec &spec, const LabeledBatch &test) {
  require_log(log);
  const auto &ids = log.rounds.front().client_ids;
  std::vector<double> total(ids.size(), 0.0);
  for (const auto &rec : log.rounds) {
    const auto cu = CoalitionUtility::from_round(rec, spec, test);
    const auto players = player_positions(rec);
    const std::uint64_t all = (std::uint64_t{1} << players.size()) - 1;
    const double v_all = cu.value(all);
    for (std::size_t p = 0; p < players.size(); ++p) {
      total[players[p]] += v_all - cu.value(all & ~(std::uint64_t{1} << p));
    }
  }
  return make_report(Evaluator::kLooRound, ids, std::move(total));
}

namespace {

double final_utility_of(const FlSetup &setup, const BehaviorFactory &factory) {
  std::vector<std::unique_ptr<ClientBehavior>> behaviors;
  for (const auto &shard : setup.shards) behaviors.push_back(factory(shard));
  return run_training(setup, behaviors).final_utility;
}

}  // namespace

double loo_retrain(const FlSetup &setup, const BehaviorFactory &factory, int client_id, double full_utility) {
  FlSetup reduced = setup;
  const auto it = std::find_if(reduced.shards.begin(), reduced.shards.end(),
                               [&](const ClientShard &s) { return s.client_id == client_id; });
  if (it == reduced.shards.end()) throw std::invalid_argument("loo_retrain: unknown client " + std::to_string(client_id));
  reduced.shards.erase(it);
  if (reduced.shards.empty()) return full_utility - utility(setup.spec, init_params(setup.spec, model_init_seed(setup.master_seed)), setup.test);
  if (reduced.defense.mode != DefenseMode::kOff && reduced.shards.size() < 2) reduced.defense.mode = DefenseMode::kOff;
  return full_utility - final_utility_of(reduced, factory);
}

AttributionReport loo_retrain_report(const FlSetup &setup, const BehaviorFactory &factory) {
  const double full = final_utility_of(setup, factory);
  std::vector<int> ids;
  std::vector<double> raw;
  for (const auto &shard : setup.shards) {
    ids.push_back(shard.client_id);
    raw.push_back(loo_retrain(setup, factory, shard.client_id, full));
  }
  return make_report(Evaluator::kLooRetrain, std::move(ids), std::move(raw));
}

void write_attribution_table(std::ostream &out, const AttributionReport &report, bool header) {
  if (header) out << "evaluator,client_id,raw,share,rank\n";
  for (std::size_t i = 0; i < report.size(); ++i) {
    out << to_string(report.evaluator) << ',' << report.client_ids[i] << ',' << format_double(report.raw[i]) << ','
        << format_double(report.shares[i]) << ',' << report.ranks[i] << '\n';
  }
}

}  // namespace attrfl
