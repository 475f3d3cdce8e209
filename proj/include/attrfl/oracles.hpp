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

#ifndef ATTRFL_ORACLES_HPP_
#define ATTRFL_ORACLES_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "attrfl/flcore.hpp"
#include "attrfl/models.hpp"

// Brute-force reference implementations. They deliberately avoid the code
// paths they check: no shared aggregation, Shapley weighting or model code.
namespace attrfl::oracles {

inline constexpr std::size_t kMaxBruteforcePlayers = 8;

// Average marginal contribution over all N! orderings. `table[mask]` is the
// value of the coalition with bitmask `mask`; size must be 2^N.
std::vector<double> shapley_bruteforce(std::span<const double> table, std::size_t num_players);

// Central differences, one coordinate at a time.
std::vector<double> fd_gradient(const std::function<double(std::span<const double>)> &f, std::span<const double> x,
                                double step);

// Test accuracy recomputed from the documented parameter layout.
double reference_accuracy(const ModelSpec &spec, std::span<const double> params, const LabeledBatch &test);

// Round-aggregated leave-one-out from scratch: per round, rebuild the
// weighted averages with and without each client and score them.
std::vector<double> loo_recompute(const TrainingLog &log, const ModelSpec &spec, const LabeledBatch &test);

}  // namespace attrfl::oracles

#endif  // ATTRFL_ORACLES_HPP_
