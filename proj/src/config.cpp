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

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "attrfl/experiment.hpp"
#include "attrfl/format.hpp"

namespace attrfl {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t to_u64(const std::string &key, const std::string &v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
    const auto out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

int to_int(const std::string &key, const std::string &v) {
  try {
    std::size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

double to_double(const std::string &key, const std::string &v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

template <typename Fn>
auto wrap(const std::string &key, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

struct Field {
  const char *key;
  std::function<std::string(const ExperimentConfig &)> get;
  std::function<void(ExperimentConfig &, const std::string &, const std::string &)> set;
};

std::string join_evaluators(const std::vector<Evaluator> &es) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) out += (i ? "," : "") + to_string(es[i]);
  return out;
}

const std::vector<Field> &fields() {
  using C = ExperimentConfig;
  using S = const std::string &;
  static const std::vector<Field> table = {
      {"run_id", [](const C &c) { return c.run_id; }, [](C &c, S, S v) { c.run_id = v; }},
      {"seed", [](const C &c) { return std::to_string(c.seed); }, [](C &c, S k, S v) { c.seed = to_u64(k, v); }},
      {"dataset.generator", [](const C &c) { return to_string(c.dataset.generator); },
       [](C &c, S k, S v) { c.dataset.generator = wrap(k, [&] { return parse_generator(v); }); }},
      {"dataset.num_classes", [](const C &c) { return std::to_string(c.dataset.num_classes); },
       [](C &c, S k, S v) { c.dataset.num_classes = to_u64(k, v); }},
      {"dataset.input_dim", [](const C &c) { return std::to_string(c.dataset.input_dim); },
       [](C &c, S k, S v) { c.dataset.input_dim = to_u64(k, v); }},
      {"dataset.samples_per_class", [](const C &c) { return std::to_string(c.dataset.samples_per_class); },
       [](C &c, S k, S v) { c.dataset.samples_per_class = to_u64(k, v); }},
      {"dataset.separation", [](const C &c) { return format_double(c.dataset.class_separation); },
       [](C &c, S k, S v) { c.dataset.class_separation = to_double(k, v); }},
      {"dataset.noise", [](const C &c) { return format_double(c.dataset.noise_scale); },
       [](C &c, S k, S v) { c.dataset.noise_scale = to_double(k, v); }},
      {"partition.num_clients", [](const C &c) { return std::to_string(c.partition.num_clients); },
       [](C &c, S k, S v) { c.partition.num_clients = to_u64(k, v); }},
      {"partition.classes_per_client", [](const C &c) { return std::to_string(c.partition.classes_per_client); },
       [](C &c, S k, S v) { c.partition.classes_per_client = to_u64(k, v); }},
      {"partition.samples_per_client", [](const C &c) { return std::to_string(c.partition.samples_per_client); },
       [](C &c, S k, S v) { c.partition.samples_per_client = to_u64(k, v); }},
      {"model.kind", [](const C &c) { return to_string(c.model_kind); },
       [](C &c, S k, S v) { c.model_kind = wrap(k, [&] { return parse_model_kind(v); }); }},
      {"model.hidden_dim", [](const C &c) { return std::to_string(c.hidden_dim); },
       [](C &c, S k, S v) { c.hidden_dim = to_u64(k, v); }},
      {"fl.rounds", [](const C &c) { return std::to_string(c.rounds); }, [](C &c, S k, S v) { c.rounds = to_int(k, v); }},
      {"fl.local_epochs", [](const C &c) { return std::to_string(c.sgd.epochs); },
       [](C &c, S k, S v) { c.sgd.epochs = to_int(k, v); }},
      {"fl.batch_size", [](const C &c) { return std::to_string(c.sgd.batch_size); },
       [](C &c, S k, S v) { c.sgd.batch_size = to_u64(k, v); }},
      {"fl.eta_w", [](const C &c) { return format_double(c.sgd.eta_w); },
       [](C &c, S k, S v) { c.sgd.eta_w = to_double(k, v); }},
      {"eval.evaluators", [](const C &c) { return join_evaluators(c.evaluators); },
       [](C &c, S k, S v) {
         c.evaluators.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           item = trim(item);
           if (!item.empty()) c.evaluators.push_back(wrap(k, [&] { return parse_evaluator(item); }));
         }
       }},
      {"eval.mc_permutations", [](const C &c) { return std::to_string(c.mc_permutations); },
       [](C &c, S k, S v) { c.mc_permutations = to_u64(k, v); }},
      {"attack.method", [](const C &c) { return to_string(c.attack); },
       [](C &c, S k, S v) { c.attack = wrap(k, [&] { return parse_attack_method(v); }); }},
      {"attack.target", [](const C &c) { return c.target.to_string(); },
       [](C &c, S k, S v) { c.target = wrap(k, [&] { return TargetRule::parse(v); }); }},
      {"attack.intensity", [](const C &c) { return format_double(c.latent.intensity); },
       [](C &c, S k, S v) { c.latent.intensity = to_double(k, v); }},
      {"attack.noise_sigma_rel", [](const C &c) { return format_double(c.noise_sigma_rel); },
       [](C &c, S k, S v) { c.noise_sigma_rel = to_double(k, v); }},
      {"attack.delta", [](const C &c) { return format_double(c.delta); }, [](C &c, S k, S v) { c.delta = to_double(k, v); }},
      {"attack.eps", [](const C &c) { return format_double(c.eps); }, [](C &c, S k, S v) { c.eps = to_double(k, v); }},
      {"attack.kappa", [](const C &c) { return c.kappa > 0.0 ? format_double(c.kappa) : std::string("auto"); },
       [](C &c, S k, S v) { c.kappa = v == "auto" ? 0.0 : to_double(k, v); }},
      {"attack.kappa_mult", [](const C &c) { return format_double(c.kappa_mult); },
       [](C &c, S k, S v) { c.kappa_mult = to_double(k, v); }},
      {"attack.c_max", [](const C &c) { return c.c_max ? std::to_string(c.c_max) : std::string("auto"); },
       [](C &c, S k, S v) { c.c_max = v == "auto" ? 0 : to_u64(k, v); }},
      {"attack.latent_dim", [](const C &c) { return std::to_string(c.latent.latent_dim); },
       [](C &c, S k, S v) { c.latent.latent_dim = to_u64(k, v); }},
      {"attack.latent_steps", [](const C &c) { return std::to_string(c.latent.latent_steps); },
       [](C &c, S k, S v) { c.latent.latent_steps = to_int(k, v); }},
      {"attack.synthetic_batch", [](const C &c) { return std::to_string(c.latent.synthetic_batch); },
       [](C &c, S k, S v) { c.latent.synthetic_batch = to_u64(k, v); }},
      {"attack.eta_z", [](const C &c) { return format_double(c.latent.eta_z); },
       [](C &c, S k, S v) { c.latent.eta_z = to_double(k, v); }},
      {"attack.decoder_pool_per_class", [](const C &c) { return std::to_string(c.decoder_pool_per_class); },
       [](C &c, S k, S v) { c.decoder_pool_per_class = to_u64(k, v); }},
      {"defense.mode", [](const C &c) { return to_string(c.defense); },
       [](C &c, S k, S v) { c.defense = wrap(k, [&] { return parse_defense_mode(v); }); }},
      {"defense.tau", [](const C &c) { return format_double(c.tau); }, [](C &c, S k, S v) { c.tau = to_double(k, v); }},
      {"output.dir", [](const C &c) { return c.output_dir; }, [](C &c, S, S v) { c.output_dir = v; }},
  };
  return table;
}

}  // namespace

TargetRule TargetRule::parse(const std::string &text) {
  if (text == "lowest_rank") return {0};
  if (text.rfind("rank_", 0) == 0) {
    const int k = std::atoi(text.c_str() + 5);
    if (k < 1 || std::to_string(k) != text.substr(5)) throw std::invalid_argument("bad target rule: " + text);
    return {k};
  }
  throw std::invalid_argument("bad target rule (lowest_rank | rank_<k>): " + text);
}

std::string TargetRule::to_string() const { return rank == 0 ? "lowest_rank" : "rank_" + std::to_string(rank); }

ModelSpec ExperimentConfig::model_spec() const {
  return {model_kind, dataset.input_dim, model_kind == ModelKind::kLogistic ? 0 : hidden_dim, dataset.num_classes};
}

std::vector<std::string> ExperimentConfig::keys() {
  std::vector<std::string> out;
  for (const auto &f : fields()) out.emplace_back(f.key);
  return out;
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto &f : fields()) {
    if (std::string(f.key) == "output.dir") continue;
    out += std::string(f.key) + " = " + f.get(*this) + "\n";
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return format("%016llx", static_cast<unsigned long long>(h));
}

void ExperimentConfig::set(const std::string &key, const std::string &value) {
  for (const auto &f : fields()) {
    if (key == f.key) {
      f.set(*this, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key: '" + key + "'");
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string &msg) {
    if (!ok) throw ConfigError(msg);
  };
  wrap("dataset", [&] {
    dataset.validate();
    return 0;
  });
  wrap("partition", [&] {
    partition.validate(dataset.num_classes);
    return 0;
  });
  wrap("model", [&] {
    (void)model_spec();
    return 0;
  });
  check(rounds >= 1, "fl.rounds must be >= 1");
  check(sgd.epochs >= 1, "fl.local_epochs must be >= 1");
  check(sgd.batch_size >= 1, "fl.batch_size must be >= 1");
  check(sgd.eta_w > 0.0, "fl.eta_w must be positive");
  check(!evaluators.empty(), "eval.evaluators must list at least one evaluator");
  check(mc_permutations >= 1, "eval.mc_permutations must be >= 1");
  for (Evaluator e : evaluators) {
    check(e != Evaluator::kFedsvExact || partition.num_clients <= kMaxExactPlayers,
          "fedsv_exact supports at most 16 clients; use fedsv_mc");
  }
  check(target.rank <= static_cast<int>(partition.num_clients), "attack.target rank exceeds num_clients");
  check(latent.intensity >= 0.0, "attack.intensity must be >= 0");
  check(noise_sigma_rel >= 0.0, "attack.noise_sigma_rel must be >= 0");
  check(delta >= 0.0, "attack.delta must be >= 0");
  check(eps >= 0.0, "attack.eps must be >= 0");
  check(kappa_mult > 0.0, "attack.kappa_mult must be positive");
  check(latent.latent_dim >= 1, "attack.latent_dim must be >= 1");
  check(latent.latent_steps >= 0, "attack.latent_steps must be >= 0");
  check(latent.eta_z >= 0.0, "attack.eta_z must be >= 0");
  check(decoder_pool_per_class >= 1, "attack.decoder_pool_per_class must be >= 1");
  check(tau > 0.0 && tau < 1.0, "defense.tau must be in (0, 1)");
}

ExperimentConfig ExperimentConfig::parse(const std::string &text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(format("config line %d: expected 'key = value'", lineno));
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

ExperimentConfig default_scenario(Seed seed) {
  ExperimentConfig c;
  c.run_id = "desk";
  c.seed = seed;
  c.dataset.generator = Generator::kGaussianBlobs;
  c.dataset.num_classes = 6;
  c.dataset.input_dim = 10;
  c.dataset.samples_per_class = 500;
  c.dataset.class_separation = 3.0;
  c.dataset.noise_scale = 1.0;
  c.partition.num_clients = 6;
  c.partition.classes_per_client = 2;
  c.partition.samples_per_client = 300;
  c.model_kind = ModelKind::kLogistic;
  c.rounds = 15;
  c.sgd.epochs = 3;
  c.sgd.eta_w = 0.3;
  c.evaluators = {Evaluator::kFedsvExact};
  c.attack = AttackMethod::kLatentOpt;
  c.latent.synthetic_batch = 32;
  return c;
}

}  // namespace attrfl
