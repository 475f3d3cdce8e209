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

#ifndef ATTRFL_DEFENSE_HPP_
#define ATTRFL_DEFENSE_HPP_

#include <set>
#include <span>
#include <string>
#include <vector>

#include "attrfl/param_vector.hpp"

namespace attrfl {

enum class DefenseMode {
  kOff,
  // Score trimming as a detector; aggregation is unchanged.
  kMonitor,
  // Aggregate over kept clients only.
  kEnforce,
};

std::string to_string(DefenseMode mode);
DefenseMode parse_defense_mode(const std::string &name);

struct DefenseConfig {
  DefenseMode mode = DefenseMode::kOff;
  double tau = 0.1;
  double eps = 0.5;
};

struct TrimDecision {
  int t = 0;
  std::vector<double> distances;
  std::set<int> trimmed;
  std::set<int> kept;
};

struct DetectionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Geometry-based trimming: Euclidean distance of every update to the
// coordinate-wise median, then drop the ceil(tau * N) farthest. Equal
// distances trim the higher client index first. Client ids are positions in
// `updates`.
TrimDecision trim_round(std::span<const ParamVector> updates, double tau, int t = 0);

// 1 - cosine(update, coordinate median of kept). Zero vectors give 1.
double plausibility_distance(const ParamVector &update, std::span<const ParamVector> kept_updates);

struct PlausibilityResult {
  double distance = 0.0;
  bool flagged = false;
};

PlausibilityResult plausibility_check(const ParamVector &update, std::span<const ParamVector> kept_updates,
                                      double eps);

// Per-round precision/recall/F1 of "trimmed" as a detector of `malicious`,
// averaged over rounds.
DetectionScore detection_metrics(std::span<const TrimDecision> decisions, const std::set<int> &malicious);

// Expected score of trimming `trimmed_per_round` clients uniformly at random
// out of `num_clients`, computed by exhaustive enumeration.
DetectionScore random_guess_score(int num_clients, int trimmed_per_round, const std::set<int> &malicious);

}  // namespace attrfl

#endif  // ATTRFL_DEFENSE_HPP_
