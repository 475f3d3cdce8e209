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

#include "attrfl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "attrfl/format.hpp"
#include "attrfl/plots.hpp"

namespace attrfl {

using json = nlohmann::ordered_json;

const PhaseAttribution &ExperimentReport::evaluation(Evaluator e) const {
  for (const auto &ev : evaluations) {
    if (ev.attack_free.evaluator == e) return ev;
  }
  throw std::out_of_range("evaluator not in report: " + to_string(e));
}

double ExperimentReport::attacker_share_before() const {
  const auto &rep = primary().attack_free;
  return rep.shares[rep.index_of(malicious)];
}

double ExperimentReport::attacker_share_after() const {
  const auto &rep = primary().attacked;
  return rep.shares[rep.index_of(malicious)];
}

int select_malicious(const AttributionReport &attack_free, const TargetRule &rule) {
  const int n = static_cast<int>(attack_free.size());
  const int want = rule.rank == 0 ? n : rule.rank;
  if (want < 1 || want > n) throw std::out_of_range("select_malicious: rank " + std::to_string(want) + " out of range");
  for (int i = 0; i < n; ++i) {
    if (attack_free.ranks[static_cast<std::size_t>(i)] == want) return attack_free.client_ids[static_cast<std::size_t>(i)];
  }
  throw std::logic_error("select_malicious: ranks are not a permutation");
}

namespace {

struct Scenario {
  ModelSpec spec;
  FlSetup setup;
  Decoder decoder;
};

Scenario build_scenario(const ExperimentConfig &config) {
  DatasetSpec ds = config.dataset;
  ds.seed = derive_seed(config.seed, "dataset-spec");
  const Dataset data = synthesize(ds);
  PartitionSpec ps = config.partition;
  ps.seed = derive_seed(config.seed, "partition-spec");

  const ModelSpec spec = config.model_spec();
  FlSetup setup;
  setup.spec = spec;
  setup.sgd = config.sgd;
  setup.rounds = config.rounds;
  setup.master_seed = config.seed;
  setup.test = data.test;
  setup.shards = partition_noniid(data.train, ds.num_classes, ps);
  setup.defense = {config.defense, config.tau, config.eps};
  setup.fingerprint = config.hash();

  // The attacker's decoder is calibrated on a public draw from the task distribution.
  const LabeledBatch calibration = sample_pool(ds, config.decoder_pool_per_class, derive_seed(config.seed, "decoder-pool"));
  Decoder decoder = calibrate_decoder(calibration, ds.num_classes, config.latent.latent_dim,
                                      derive_seed(config.seed, "decoder"));
  return {spec, std::move(setup), std::move(decoder)};
}

AttributionReport evaluate(Evaluator e, const ExperimentConfig &config, const Scenario &sc, const TrainingLog &log,
                           const BehaviorFactory &factory) {
  switch (e) {
    case Evaluator::kFedsvExact:
      return fedsv(log, sc.spec, sc.setup.test, {true, config.mc_permutations, derive_seed(config.seed, "mc")});
    case Evaluator::kFedsvMc:
      return fedsv(log, sc.spec, sc.setup.test, {false, config.mc_permutations, derive_seed(config.seed, "mc")});
    case Evaluator::kLooRound:
      return loo_round(log, sc.spec, sc.setup.test);
    case Evaluator::kLooRetrain:
      return loo_retrain_report(sc.setup, factory);
  }
  throw std::logic_error("unknown evaluator");
}

double median_update_norm(const TrainingLog &log) {
  std::vector<double> norms;
  for (const auto &rec : log.rounds) {
    for (const auto &u : rec.updates) norms.push_back(u.norm());
  }
  std::sort(norms.begin(), norms.end());
  const std::size_t m = norms.size() / 2;
  return norms.size() % 2 ? norms[m] : 0.5 * (norms[m - 1] + norms[m]);
}

std::vector<TrimDecision> trim_decisions(const TrainingLog &log) {
  std::vector<TrimDecision> out;
  for (const auto &rec : log.rounds) {
    if (rec.trim) out.push_back(*rec.trim);
  }
  return out;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

ExperimentRun run_experiment_full(const ExperimentConfig &config) {
  config.validate();
  const Scenario sc = build_scenario(config);
  const std::size_t num_clients = sc.setup.shards.size();

  AttackParams params;
  params.method = config.attack;
  params.noise_sigma_rel = config.noise_sigma_rel;
  params.latent = config.latent;
  params.budgets.delta = config.delta;
  params.budgets.eps = config.eps;
  params.budgets.c_max = config.c_max ? config.c_max : sc.spec.param_count();

  ExperimentRun run;
  ExperimentReport &rep = run.report;
  rep.run_id = config.run_id;
  rep.config_hash = config.hash();
  rep.config_text = config.to_text();
  rep.attack = config.attack;
  rep.target_rule = config.target.to_string();
  rep.intensity = config.latent.intensity;
  rep.num_clients = num_clients;
  rep.delta = config.delta;
  rep.c_max = params.budgets.c_max;
  if (sc.spec.param_count() > rep.c_max) throw std::runtime_error("update size exceeds the communication budget c_max");

  // Phase 1: attack-free.
  const BehaviorFactory benign_factory = [](const ClientShard &) { return std::make_unique<BenignBehavior>(); };
  {
    std::vector<std::unique_ptr<ClientBehavior>> behaviors;
    for (const auto &shard : sc.setup.shards) behaviors.push_back(benign_factory(shard));
    try {
      run.attack_free_log = run_training(sc.setup, behaviors);
    } catch (const std::exception &e) {
      throw std::runtime_error(std::string("attack-free phase: ") + e.what());
    }
  }
  std::vector<AttributionReport> clean_reports;
  for (Evaluator e : config.evaluators) {
    clean_reports.push_back(evaluate(e, config, sc, run.attack_free_log, benign_factory));
  }
  rep.malicious = select_malicious(clean_reports.front(), config.target);

  params.budgets.kappa = config.kappa > 0.0 ? config.kappa : config.kappa_mult * median_update_norm(run.attack_free_log);
  rep.kappa = params.budgets.kappa;

  // Phase 2: the selected client switches behavior; every other stream is
  // unchanged.
  const int malicious = rep.malicious;
  LatentOptBehavior *latent = nullptr;
  const BehaviorFactory attacked_factory = [&](const ClientShard &shard) -> std::unique_ptr<ClientBehavior> {
    if (shard.client_id != malicious) return std::make_unique<BenignBehavior>();
    return make_behavior(params, &sc.decoder);
  };
  {
    std::vector<std::unique_ptr<ClientBehavior>> behaviors;
    for (const auto &shard : sc.setup.shards) {
      behaviors.push_back(attacked_factory(shard));
      if (shard.client_id == malicious) latent = dynamic_cast<LatentOptBehavior *>(behaviors.back().get());
    }
    try {
      run.attacked_log = run_training(sc.setup, behaviors);
    } catch (const std::exception &e) {
      throw std::runtime_error(std::string("attacked phase: ") + e.what());
    }
    if (latent) rep.diagnostics = latent->diagnostics();
  }
  for (std::size_t k = 0; k < config.evaluators.size(); ++k) {
    rep.evaluations.push_back(
        {clean_reports[k], evaluate(config.evaluators[k], config, sc, run.attacked_log, attacked_factory)});
  }

  // Server-side plausibility of the attacker's report against the benign set.
  for (const auto &rec : run.attacked_log.rounds) {
    std::vector<ParamVector> benign;
    const ParamVector *mine = nullptr;
    for (std::size_t i = 0; i < rec.updates.size(); ++i) {
      if (rec.client_ids[i] == malicious) {
        mine = &rec.updates[i];
      } else {
        benign.push_back(rec.updates[i]);
      }
    }
    if (!mine || benign.empty()) continue;
    const auto check = plausibility_check(*mine, benign, config.eps);
    rep.plausibility.push_back({rec.t, check.distance, check.flagged});
  }

  if (config.defense != DefenseMode::kOff) {
    rep.detection = detection_metrics(trim_decisions(run.attacked_log), {malicious});
    rep.detection_attack_free = detection_metrics(trim_decisions(run.attack_free_log), {malicious});
  }

  rep.u0 = run.attack_free_log.final_utility;
  rep.u1 = run.attacked_log.final_utility;
  rep.utility_ok = std::abs(rep.u1 - rep.u0) <= config.delta;

  if (!config.output_dir.empty()) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    write_text(dir / "config.txt", rep.config_text);
    write_report(rep, dir / "report.json");
    write_csv(rep, dir / "attribution.csv");
    write_log(dir / "log_attack_free.jsonl", run.attack_free_log);
    write_log(dir / "log_attacked.jsonl", run.attacked_log);
    write_diagnostics(rep, dir / "diagnostics.jsonl");
    emit_plots(rep, dir);
  }
  return run;
}

ExperimentReport run_experiment(const ExperimentConfig &config) { return run_experiment_full(config).report; }

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNumClients:
      return "num_clients";
    case SweepAxis::kTargetRank:
      return "target_rank";
    case SweepAxis::kIntensity:
      return "intensity";
    case SweepAxis::kMethod:
      return "method";
  }
  return "intensity";
}

SweepAxis parse_sweep_axis(const std::string &name) {
  if (name == "num_clients") return SweepAxis::kNumClients;
  if (name == "target_rank") return SweepAxis::kTargetRank;
  if (name == "intensity") return SweepAxis::kIntensity;
  if (name == "method") return SweepAxis::kMethod;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

SweepResult sweep(const ExperimentConfig &config, SweepAxis axis, const std::vector<std::string> &values) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  SweepResult result;
  result.axis = axis;
  result.values = values;
  for (const auto &value : values) {
    ExperimentConfig point = config;
    switch (axis) {
      case SweepAxis::kNumClients:
        point.set("partition.num_clients", value);
        break;
      case SweepAxis::kTargetRank:
        point.set("attack.target", value == "lowest_rank" ? value : "rank_" + value);
        break;
      case SweepAxis::kIntensity:
        point.set("attack.intensity", value);
        break;
      case SweepAxis::kMethod:
        point.set("attack.method", value);
        break;
    }
    point.run_id = config.run_id + "_" + to_string(axis) + "_" + value;
    if (!config.output_dir.empty()) point.output_dir = (std::filesystem::path(config.output_dir) / point.run_id).string();
    point.validate();
    try {
      result.reports.push_back(run_experiment(point));
    } catch (const std::exception &e) {
      throw std::runtime_error("sweep point " + to_string(axis) + "=" + value + ": " + e.what());
    }
  }
  if (!config.output_dir.empty()) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    write_sweep_summary(result, dir / "sweep_summary.csv");
    emit_sweep_plots(result, dir);
  }
  return result;
}

// --------------------------------------------------------------------------
// Serialization

namespace {

json report_json(const AttributionReport &r) {
  json j;
  j["evaluator"] = to_string(r.evaluator);
  j["client_ids"] = r.client_ids;
  j["raw"] = r.raw;
  j["shares"] = r.shares;
  j["ranks"] = r.ranks;
  return j;
}

AttributionReport report_from(const json &j) {
  AttributionReport r;
  r.evaluator = parse_evaluator(j.at("evaluator").get<std::string>());
  r.client_ids = j.at("client_ids").get<std::vector<int>>();
  r.raw = j.at("raw").get<std::vector<double>>();
  r.shares = j.at("shares").get<std::vector<double>>();
  r.ranks = j.at("ranks").get<std::vector<int>>();
  return r;
}

json detection_json(const DetectionScore &d) { return {{"precision", d.precision}, {"recall", d.recall}, {"f1", d.f1}}; }

DetectionScore detection_from(const json &j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}

json diagnostics_json(const AttackRoundDiagnostics &d) {
  json j;
  j["t"] = d.t;
  j["l1"] = d.loss.l1;
  j["l2"] = d.loss.l2;
  j["l3"] = d.loss.l3;
  j["total"] = d.loss.total;
  j["loss_before_refine"] = d.loss_before_refine;
  j["refine_steps"] = d.refine_steps;
  j["improving_steps"] = d.improving_steps;
  j["synthetic_count"] = d.synthetic_count;
  j["effective_alpha"] = d.effective_alpha;
  j["norm_before_clip"] = d.norm_before_clip;
  j["clipped"] = d.clipped;
  return j;
}

AttackRoundDiagnostics diagnostics_from(const json &j) {
  AttackRoundDiagnostics d;
  d.t = j.at("t").get<int>();
  d.loss.l1 = j.at("l1").get<double>();
  d.loss.l2 = j.at("l2").get<double>();
  d.loss.l3 = j.at("l3").get<double>();
  d.loss.total = j.at("total").get<double>();
  d.loss_before_refine = j.at("loss_before_refine").get<double>();
  d.refine_steps = j.at("refine_steps").get<int>();
  d.improving_steps = j.at("improving_steps").get<int>();
  d.synthetic_count = j.at("synthetic_count").get<std::size_t>();
  d.effective_alpha = j.at("effective_alpha").get<double>();
  d.norm_before_clip = j.at("norm_before_clip").get<double>();
  d.clipped = j.at("clipped").get<bool>();
  return d;
}

json report_to_json_obj(const ExperimentReport &r) {
  json j;
  j["run_id"] = r.run_id;
  j["config_hash"] = r.config_hash;
  j["config"] = r.config_text;
  j["attack"] = to_string(r.attack);
  j["target_rule"] = r.target_rule;
  j["intensity"] = r.intensity;
  j["num_clients"] = r.num_clients;
  j["malicious_client"] = r.malicious;
  j["kappa"] = r.kappa;
  j["c_max"] = r.c_max;
  j["utility"] = {{"U0", r.u0}, {"U1", r.u1}, {"delta", r.delta}, {"within_delta", r.utility_ok}};
  json evals = json::array();
  for (const auto &ev : r.evaluations) {
    evals.push_back({{"attack_free", report_json(ev.attack_free)}, {"attacked", report_json(ev.attacked)}});
  }
  j["evaluations"] = std::move(evals);
  if (r.detection) j["detection"] = detection_json(*r.detection);
  if (r.detection_attack_free) j["detection_attack_free"] = detection_json(*r.detection_attack_free);
  json diags = json::array();
  for (const auto &d : r.diagnostics) diags.push_back(diagnostics_json(d));
  j["attack_diagnostics"] = std::move(diags);
  json plaus = json::array();
  for (const auto &p : r.plausibility) plaus.push_back({{"t", p.t}, {"distance", p.distance}, {"flagged", p.flagged}});
  j["server_plausibility"] = std::move(plaus);
  return j;
}

}  // namespace

std::string report_to_json(const ExperimentReport &report) { return report_to_json_obj(report).dump(2) + "\n"; }

ExperimentReport report_from_json(const std::string &text) {
  const json j = json::parse(text);
  ExperimentReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.config_text = j.at("config").get<std::string>();
  r.attack = parse_attack_method(j.at("attack").get<std::string>());
  r.target_rule = j.at("target_rule").get<std::string>();
  r.intensity = j.at("intensity").get<double>();
  r.num_clients = j.at("num_clients").get<std::size_t>();
  r.malicious = j.at("malicious_client").get<int>();
  r.kappa = j.at("kappa").get<double>();
  r.c_max = j.at("c_max").get<std::size_t>();
  const auto &u = j.at("utility");
  r.u0 = u.at("U0").get<double>();
  r.u1 = u.at("U1").get<double>();
  r.delta = u.at("delta").get<double>();
  r.utility_ok = u.at("within_delta").get<bool>();
  for (const auto &ev : j.at("evaluations")) {
    r.evaluations.push_back({report_from(ev.at("attack_free")), report_from(ev.at("attacked"))});
  }
  if (j.contains("detection")) r.detection = detection_from(j["detection"]);
  if (j.contains("detection_attack_free")) r.detection_attack_free = detection_from(j["detection_attack_free"]);
  for (const auto &d : j.at("attack_diagnostics")) r.diagnostics.push_back(diagnostics_from(d));
  for (const auto &p : j.at("server_plausibility")) {
    r.plausibility.push_back({p.at("t").get<int>(), p.at("distance").get<double>(), p.at("flagged").get<bool>()});
  }
  return r;
}

void write_report(const ExperimentReport &report, const std::filesystem::path &path) {
  write_text(path, report_to_json(report));
}

ExperimentReport read_report(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

void write_csv(const ExperimentReport &report, const std::filesystem::path &path) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto &ev : report.evaluations) {
    for (const auto *phase : {&ev.attack_free, &ev.attacked}) {
      const char *name = phase == &ev.attack_free ? "attack_free" : "attacked";
      for (std::size_t i = 0; i < phase->size(); ++i) {
        out << report.run_id << ',' << to_string(phase->evaluator) << ',' << phase->client_ids[i] << ','
            << format_double(phase->raw[i]) << ',' << format_double(phase->shares[i]) << ',' << phase->ranks[i] << ','
            << name << '\n';
      }
    }
  }
  write_text(path, out.str());
}

std::vector<CsvRow> read_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("unexpected CSV header in " + path.string());
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error("malformed CSV row: " + line);
    rows.push_back({cells[0], cells[1], std::stoi(cells[2]), std::stod(cells[3]), std::stod(cells[4]),
                    std::stoi(cells[5]), cells[6]});
  }
  return rows;
}

void write_sweep_summary(const SweepResult &result, const std::filesystem::path &path) {
  std::ostringstream out;
  out << "axis,value,run_id,attack,malicious_client,evaluator,share_before,share_after,rank_before,rank_after,U0,U1,"
         "within_delta\n";
  for (std::size_t k = 0; k < result.reports.size(); ++k) {
    const auto &r = result.reports[k];
    for (const auto &ev : r.evaluations) {
      const std::size_t idx = ev.attack_free.index_of(r.malicious);
      out << to_string(result.axis) << ',' << result.values[k] << ',' << r.run_id << ',' << to_string(r.attack) << ','
          << r.malicious << ',' << to_string(ev.attack_free.evaluator) << ',' << format_double(ev.attack_free.shares[idx])
          << ',' << format_double(ev.attacked.shares[idx]) << ',' << ev.attack_free.ranks[idx] << ','
          << ev.attacked.ranks[idx] << ',' << format_double(r.u0) << ',' << format_double(r.u1) << ','
          << (r.utility_ok ? 1 : 0) << '\n';
    }
  }
  write_text(path, out.str());
}

void write_diagnostics(const ExperimentReport &report, const std::filesystem::path &path) {
  std::ostringstream out;
  for (const auto &d : report.diagnostics) out << diagnostics_json(d).dump() << '\n';
  write_text(path, out.str());
}

}  // namespace attrfl
