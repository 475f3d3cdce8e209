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

#ifndef ATTRFL_EXPERIMENT_HPP_
#define ATTRFL_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "attrfl/attacks.hpp"
#include "attrfl/attribution.hpp"
#include "attrfl/data.hpp"
#include "attrfl/defense.hpp"
#include "attrfl/flcore.hpp"
#include "attrfl/models.hpp"

namespace attrfl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Attacker selection from the attack-free ranking.
struct TargetRule {
  // 0 means "lowest rank" (rank N).
  int rank = 0;

  static TargetRule parse(const std::string &text);
  std::string to_string() const;
};

struct ExperimentConfig {
  std::string run_id = "run";
  Seed seed = 1;

  DatasetSpec dataset;
  PartitionSpec partition;
  ModelKind model_kind = ModelKind::kLogistic;
  std::size_t hidden_dim = 0;

  int rounds = 15;
  SgdConfig sgd;

  std::vector<Evaluator> evaluators{Evaluator::kFedsvExact, Evaluator::kLooRound};
  std::size_t mc_permutations = 200;

  AttackMethod attack = AttackMethod::kLatentOpt;
  TargetRule target;
  double noise_sigma_rel = 1.0;
  LatentHyper latent;
  double delta = 0.02;
  double eps = 0.5;
  // <= 0 selects kappa_mult times the median attack-free update norm.
  double kappa = 0.0;
  double kappa_mult = 3.0;
  // 0 selects the parameter count.
  std::size_t c_max = 0;
  std::size_t decoder_pool_per_class = 20;

  DefenseMode defense = DefenseMode::kOff;
  double tau = 0.1;

  std::string output_dir;

  ModelSpec model_spec() const;
  Evaluator primary_evaluator() const { return evaluators.front(); }

  // Canonical "key = value" text with every key in fixed order.
  std::string to_text() const;
  // 16 hex digits of FNV-1a over to_text().
  std::string hash() const;

  void set(const std::string &key, const std::string &value);
  void validate() const;

  static ExperimentConfig parse(const std::string &text);
  static ExperimentConfig load(const std::filesystem::path &path);
  static std::vector<std::string> keys();
};

// Desk-scale default scenario used by the acceptance suite.
ExperimentConfig default_scenario(Seed seed = 1);

struct PhaseAttribution {
  AttributionReport attack_free;
  AttributionReport attacked;
};

struct ServerPlausibility {
  int t = 0;
  double distance = 0.0;
  bool flagged = false;
};

struct ExperimentReport {
  std::string run_id;
  std::string config_hash;
  std::string config_text;
  AttackMethod attack = AttackMethod::kAttackFree;
  std::string target_rule;
  double intensity = 1.0;
  std::size_t num_clients = 0;
  int malicious = -1;
  double kappa = 0.0;
  std::size_t c_max = 0;
  double u0 = 0.0;
  double u1 = 0.0;
  double delta = 0.0;
  bool utility_ok = true;
  std::vector<PhaseAttribution> evaluations;
  std::optional<DetectionScore> detection;
  std::optional<DetectionScore> detection_attack_free;
  std::vector<AttackRoundDiagnostics> diagnostics;
  std::vector<ServerPlausibility> plausibility;

  const PhaseAttribution &evaluation(Evaluator e) const;
  const PhaseAttribution &primary() const { return evaluations.front(); }
  double attacker_share_before() const;
  double attacker_share_after() const;
};

struct ExperimentRun {
  ExperimentReport report;
  TrainingLog attack_free_log;
  TrainingLog attacked_log;
};

// Lowest rank selects rank N; otherwise the client holding that rank.
int select_malicious(const AttributionReport &attack_free, const TargetRule &rule);

// Attack-free run, attacker selection, paired attacked run, evaluators,
// defense scoring and the utility verdict. Writes outputs when
// config.output_dir is set.
ExperimentRun run_experiment_full(const ExperimentConfig &config);
ExperimentReport run_experiment(const ExperimentConfig &config);

enum class SweepAxis { kNumClients, kTargetRank, kIntensity, kMethod };

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string &name);

struct SweepResult {
  SweepAxis axis = SweepAxis::kIntensity;
  std::vector<std::string> values;
  std::vector<ExperimentReport> reports;
};

// One paired experiment per value under the shared master seed. Each point
// gets its own subdirectory under config.output_dir when set.
SweepResult sweep(const ExperimentConfig &config, SweepAxis axis, const std::vector<std::string> &values);

// Serialization --------------------------------------------------------------

std::string report_to_json(const ExperimentReport &report);
ExperimentReport report_from_json(const std::string &text);

inline constexpr const char *kCsvHeader = "run_id,evaluator,client_id,raw,share,rank,phase";

struct CsvRow {
  std::string run_id;
  std::string evaluator;
  int client_id = 0;
  double raw = 0.0;
  double share = 0.0;
  int rank = 0;
  std::string phase;
};

void write_csv(const ExperimentReport &report, const std::filesystem::path &path);
std::vector<CsvRow> read_csv(const std::filesystem::path &path);
void write_report(const ExperimentReport &report, const std::filesystem::path &path);
ExperimentReport read_report(const std::filesystem::path &path);
void write_sweep_summary(const SweepResult &result, const std::filesystem::path &path);
void write_diagnostics(const ExperimentReport &report, const std::filesystem::path &path);

}  // namespace attrfl

#endif  // ATTRFL_EXPERIMENT_HPP_
