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

#include "attrfl/defense.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace attrfl {

std::string to_string(DefenseMode mode) {
  switch (mode) {
    case DefenseMode::kOff:
      return "off";
    case DefenseMode::kMonitor:
      return "monitor";
    case DefenseMode::kEnforce:
      return "enforce";
  }
  return "off";
}

DefenseMode parse_defense_mode(const std::string &name) {
  if (name == "off") return DefenseMode::kOff;
  if (name == "monitor") return DefenseMode::kMonitor;
  if (name == "enforce") return DefenseMode::kEnforce;
  throw std::invalid_argument("unknown defense mode: " + name);
}

TrimDecision trim_round(std::span<const ParamVector> updates, double tau, int t) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("trim_round: tau must be in (0, 1)");
  const int n = static_cast<int>(updates.size());
  if (n < 2) throw std::invalid_argument("trim_round: need at least two updates");

  TrimDecision out;
  out.t = t;
  const ParamVector center = coordinate_median(updates);
  out.distances.reserve(updates.size());
  for (const auto &u : updates) out.distances.push_back((u - center).norm());

  std::vector<int> order(updates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (out.distances[a] != out.distances[b]) return out.distances[a] > out.distances[b];
    return a > b;
  });
  // Guard against 0.1 * 10 landing a hair above 1.
  const int count = static_cast<int>(std::ceil(tau * n - 1e-9));
  for (int k = 0; k < n; ++k) (k < count ? out.trimmed : out.kept).insert(order[k]);
  return out;
}

double plausibility_distance(const ParamVector &update, std::span<const ParamVector> kept_updates) {
  if (kept_updates.empty()) throw std::invalid_argument("plausibility: empty reference set");
  const ParamVector center = coordinate_median(kept_updates);
  if (update.norm() == 0.0 || center.norm() == 0.0) return 1.0;
  return 1.0 - cosine(update, center);
}

PlausibilityResult plausibility_check(const ParamVector &update, std::span<const ParamVector> kept_updates,
                                      double eps) {
  const double d = plausibility_distance(update, kept_updates);
  return {d, d > eps};
}

DetectionScore detection_metrics(std::span<const TrimDecision> decisions, const std::set<int> &malicious) {
  if (decisions.empty()) throw std::invalid_argument("detection_metrics: no rounds");
  if (malicious.empty()) throw std::invalid_argument("detection_metrics: recall undefined without malicious clients");
  DetectionScore acc;
  for (const auto &d : decisions) {
    std::size_t hits = 0;
    for (int id : d.trimmed) hits += malicious.count(id);
    const double p = d.trimmed.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(d.trimmed.size());
    const double r = static_cast<double>(hits) / static_cast<double>(malicious.size());
    const double f = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    acc.precision += p;
    acc.recall += r;
    acc.f1 += f;
  }
  const auto rounds = static_cast<double>(decisions.size());
  acc.precision /= rounds;
  acc.recall /= rounds;
  acc.f1 /= rounds;
  return acc;
}

DetectionScore random_guess_score(int num_clients, int trimmed_per_round, const std::set<int> &malicious) {
  if (trimmed_per_round < 1 || trimmed_per_round > num_clients) {
    throw std::invalid_argument("random_guess_score: invalid trim count");
  }
  // Enumerate every subset of size trimmed_per_round as one "round".
  std::vector<TrimDecision> rounds;
  std::vector<bool> pick(static_cast<std::size_t>(num_clients), false);
  std::fill(pick.end() - trimmed_per_round, pick.end(), true);
  do {
    TrimDecision d;
    for (int i = 0; i < num_clients; ++i) (pick[static_cast<std::size_t>(i)] ? d.trimmed : d.kept).insert(i);
    rounds.push_back(std::move(d));
  } while (std::next_permutation(pick.begin(), pick.end()));
  return detection_metrics(rounds, malicious);
}

}  // namespace attrfl
