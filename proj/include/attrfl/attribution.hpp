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

#ifndef ATTRFL_ATTRIBUTION_HPP_
#define ATTRFL_ATTRIBUTION_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "attrfl/flcore.hpp"
#include "attrfl/models.hpp"
#include "attrfl/param_vector.hpp"
#include "attrfl/rng.hpp"

namespace attrfl {

enum class Evaluator { kFedsvExact, kFedsvMc, kLooRound, kLooRetrain };

std::string to_string(Evaluator e);
Evaluator parse_evaluator(const std::string &name);

// Coalition game over a bitmask of players.
using CoalitionValueFn = std::function<double(std::uint64_t)>;

inline constexpr std::size_t kMaxExactPlayers = 16;

// One round's coalition game: v(S) = U(w_t + weighted_aggregate(S)) with
// data-size weights renormalized inside S, and v(empty) = U(w_t).
class CoalitionUtility {
 public:
  CoalitionUtility(ParamVector base_w, std::vector<ParamVector> updates, std::vector<std::size_t> n,
                   const ModelSpec &spec, const LabeledBatch &test);

  // Players are the clients kept in `rec`, in reporting order.
  static CoalitionUtility from_round(const RoundRecord &rec, const ModelSpec &spec, const LabeledBatch &test);

  std::size_t num_players() const { return updates_.size(); }
  double value(std::uint64_t mask) const;
  CoalitionValueFn as_function() const;

 private:
  ParamVector base_w_;
  std::vector<ParamVector> updates_;
  std::vector<std::size_t> n_;
  const ModelSpec *spec_;
  const LabeledBatch *test_;
};

double coalition_value(const CoalitionUtility &cu, std::span<const int> subset);

// Evaluates v once per subset and applies the weighted-marginal formula.
std::vector<double> shapley_exact(std::size_t num_players, const CoalitionValueFn &v);
std::vector<double> shapley_exact(const CoalitionUtility &cu);

// Mean marginal contribution over seeded uniform permutations, memoizing v.
std::vector<double> shapley_mc(std::size_t num_players, const CoalitionValueFn &v, std::size_t num_permutations,
                               Seed seed);
std::vector<double> shapley_mc(const CoalitionUtility &cu, std::size_t num_permutations, Seed seed);

struct AttributionReport {
  Evaluator evaluator = Evaluator::kFedsvExact;
  std::vector<int> client_ids;
  std::vector<double> raw;
  std::vector<double> shares;
  std::vector<int> ranks;

  std::size_t size() const { return client_ids.size(); }
  std::size_t index_of(int client_id) const;
};

// Shift by the minimum and rescale to sum to one; all-equal gives uniform.
std::vector<double> normalize_shares(std::span<const double> raw);

// Rank 1 = largest share; ties go to the lower position.
std::vector<int> rank_clients(std::span<const double> shares);

AttributionReport make_report(Evaluator e, std::vector<int> client_ids, std::vector<double> raw);

struct FedsvOptions {
  bool exact = true;
  std::size_t mc_permutations = 200;
  Seed seed = 0;
};

// Phi_i = sum over rounds of per-round Shapley values. Clients trimmed by an
// enforcing defense are not players in that round and get zero.
AttributionReport fedsv(const TrainingLog &log, const ModelSpec &spec, const LabeledBatch &test,
                        const FedsvOptions &options = {});

// Phi_i = sum over rounds of v_t(All) - v_t(All \ {i}).
AttributionReport loo_round(const TrainingLog &log, const ModelSpec &spec, const LabeledBatch &test);

using BehaviorFactory = std::function<std::unique_ptr<ClientBehavior>(const ClientShard &)>;

// U(final, all clients) - U(final, rerun without client_id, same seeds).
double loo_retrain(const FlSetup &setup, const BehaviorFactory &factory, int client_id, double full_utility);
AttributionReport loo_retrain_report(const FlSetup &setup, const BehaviorFactory &factory);

// Columns: evaluator, client_id, raw, share, rank.
void write_attribution_table(std::ostream &out, const AttributionReport &report, bool header = true);

}  // namespace attrfl

#endif  // ATTRFL_ATTRIBUTION_HPP_
