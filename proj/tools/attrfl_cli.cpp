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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "attrfl/acceptance.hpp"
#include "attrfl/experiment.hpp"
#include "attrfl/format.hpp"
#include "attrfl/plots.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;
constexpr int kExitCheck = 4;

constexpr const char *kOutRootEnv = "ATTRFL_OUT_ROOT";

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> evaluators;
  std::string defense;
  std::vector<std::string> overrides;
};

void add_common(CLI::App *cmd, Common &c) {
  cmd->add_option("--config", c.config_path, "Experiment config file (key = value lines)")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out_dir, "Output directory");
  cmd->add_option("--seed", c.seed, "Master seed, overrides the config");
  cmd->add_option("--evaluator", c.evaluators,
                  "Evaluator (fedsv_exact, fedsv_mc, loo_round, loo_retrain); repeat for several, first is primary");
  cmd->add_option("--defense", c.defense, "Defense mode (off, monitor, enforce)");
  cmd->add_option("--set", c.overrides, "Config override key=value; repeatable");
}

fs::path default_root() {
  const char *env = std::getenv(kOutRootEnv);
  return env && *env ? fs::path(env) : fs::path("attrfl-out");
}

attrfl::ExperimentConfig resolve(const Common &c) {
  attrfl::ExperimentConfig cfg =
      c.config_path.empty() ? attrfl::default_scenario() : attrfl::ExperimentConfig::load(c.config_path);
  for (const auto &kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw attrfl::ConfigError("--set expects key=value, got: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (!c.evaluators.empty()) {
    std::string joined;
    for (const auto &e : c.evaluators) joined += (joined.empty() ? "" : ",") + e;
    cfg.set("eval.evaluators", joined);
  }
  if (!c.defense.empty()) cfg.set("defense.mode", c.defense);
  if (!c.out_dir.empty()) {
    cfg.output_dir = c.out_dir;
  } else if (cfg.output_dir.empty()) {
    cfg.output_dir = (default_root() / cfg.run_id).string();
  }
  cfg.validate();
  return cfg;
}

void print_summary(const attrfl::ExperimentReport &r) {
  std::cout << attrfl::format("%s attack=%s attacker=%d U0=%.4f U1=%.4f within_delta=%s\n", r.run_id.c_str(),
                              attrfl::to_string(r.attack).c_str(), r.malicious, r.u0, r.u1,
                              r.utility_ok ? "yes" : "no");
  for (const auto &ev : r.evaluations) {
    const std::size_t i = ev.attack_free.index_of(r.malicious);
    std::cout << attrfl::format("  %-12s share %.4f -> %.4f  rank %d -> %d\n",
                                attrfl::to_string(ev.attack_free.evaluator).c_str(), ev.attack_free.shares[i],
                                ev.attacked.shares[i], ev.attack_free.ranks[i], ev.attacked.ranks[i]);
  }
  if (r.detection) {
    std::cout << attrfl::format("  trimming  precision %.4f recall %.4f f1 %.4f\n", r.detection->precision,
                                r.detection->recall, r.detection->f1);
  }
}

std::vector<std::string> split_values(const std::string &text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string v; std::getline(in, v, ',');) {
    if (!v.empty()) out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"attrfl: attribution manipulation experiments on a federated learning simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto *run = app.add_subcommand("run", "Run one paired attack-free / attacked experiment");
  add_common(run, run_opts);

  Common sweep_opts;
  std::string axis, values;
  auto *sweep = app.add_subcommand("sweep", "Run one experiment per value along an axis");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "num_clients, target_rank, intensity or method")->required();
  sweep->add_option("--values", values, "Comma-separated axis values")->required();

  std::string check_out;
  std::vector<int> only;
  auto *check = app.add_subcommand("check", "Run the acceptance suite");
  check->add_option("--out", check_out, "Scratch directory for the determinism check");
  check->add_option("--only", only, "Criterion ids to run")->delimiter(',');

  std::string plot_dir, plot_out;
  auto *plot = app.add_subcommand("plot", "Re-emit figures from a stored run or sweep directory");
  plot->add_option("dir", plot_dir, "Run or sweep output directory")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--out", plot_out, "Write figures here instead of next to the sources");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      const auto cfg = resolve(run_opts);
      const auto report = attrfl::run_experiment(cfg);
      print_summary(report);
      std::cout << "outputs: " << cfg.output_dir << '\n';
    } else if (*sweep) {
      auto cfg = resolve(sweep_opts);
      attrfl::SweepAxis parsed_axis;
      try {
        parsed_axis = attrfl::parse_sweep_axis(axis);
      } catch (const std::invalid_argument &e) {
        throw attrfl::ConfigError(e.what());
      }
      const auto vals = split_values(values);
      if (vals.empty()) throw attrfl::ConfigError("--values is empty");
      const auto result = attrfl::sweep(cfg, parsed_axis, vals);
      for (const auto &r : result.reports) print_summary(r);
      std::cout << "outputs: " << cfg.output_dir << '\n';
    } else if (*check) {
      attrfl::AcceptanceOptions opts;
      opts.only.insert(only.begin(), only.end());
      if (!check_out.empty()) opts.scratch_dir = check_out;
      opts.on_result = [](const attrfl::CriterionResult &r) { std::cout << attrfl::format_result(r) << std::endl; };
      const auto results = attrfl::run_acceptance(opts);
      const bool ok = attrfl::all_passed(results);
      std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILED") << '\n';
      return ok ? kExitOk : kExitCheck;
    } else if (*plot) {
      for (const auto &p : attrfl::replot(plot_dir, plot_out)) std::cout << p.string() << '\n';
    }
  } catch (const attrfl::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRun;
  }
  return kExitOk;
}
