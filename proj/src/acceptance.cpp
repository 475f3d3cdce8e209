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

#include "attrfl/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "attrfl/attacks.hpp"
#include "attrfl/attribution.hpp"
#include "attrfl/experiment.hpp"
#include "attrfl/format.hpp"
#include "attrfl/oracles.hpp"
#include "attrfl/plots.hpp"

namespace attrfl {

namespace {

// Tolerances and budgets.
constexpr double kShapleyOracleTol = 1e-12;
constexpr double kAxiomTol = 1e-9;
constexpr double kShapleySeconds = 10.0;
constexpr double kGradRelTol = 1e-4;
constexpr double kLatentStepRelTol = 1e-3;
constexpr double kGradientSeconds = 30.0;
constexpr double kShareSumTol = 1e-9;
constexpr double kMinShareGain = 0.05;
constexpr double kAttackSeconds = 600.0;
constexpr double kDelta = 0.02;
constexpr int kUtilitySeedsRequired = 4;
constexpr double kInversionAllowance = 0.01;
constexpr double kStealthMaxF1 = 0.15;
constexpr double kNoiseSigmaRel = 2.0;
constexpr double kNoiseMinF1 = 0.5;
constexpr double kTrimTau = 0.1;
constexpr double kLooMinGain = 0.03;

constexpr int kSeeds = 5;
constexpr Seed kFixtureSeed = 20260415;

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double> &v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string list(const std::vector<double> &v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format("%.4f", v[i]);
  return out + "]";
}

double rel_err(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
  return std::sqrt(diff) / denom;
}

// Criterion 1 -----------------------------------------------------------------

std::vector<double> random_table(std::size_t n, Rng &rng) {
  std::normal_distribution<double> nd;
  std::vector<double> table(std::size_t{1} << n);
  for (double &v : table) v = nd(rng);
  return table;
}

std::vector<double> exact_from_table(const std::vector<double> &table, std::size_t n) {
  return shapley_exact(n, [&](std::uint64_t mask) { return table[mask]; });
}

CriterionResult shapley_correctness() {
  CriterionResult r{1, "shapley_correctness", false, {}, 0.0};
  Rng rng = make_rng(kFixtureSeed, "acceptance-shapley");
  double worst_oracle = 0.0, worst_axiom = 0.0;
  for (int game = 0; game < 100; ++game) {
    const std::size_t n = 2 + static_cast<std::size_t>(game % 5);
    const std::size_t full = (std::size_t{1} << n) - 1;
    const auto table = random_table(n, rng);
    const auto phi = exact_from_table(table, n);
    const auto oracle = oracles::shapley_bruteforce(table, n);
    for (std::size_t i = 0; i < n; ++i) worst_oracle = std::max(worst_oracle, std::abs(phi[i] - oracle[i]));

    // Efficiency.
    const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
    worst_axiom = std::max(worst_axiom, std::abs(total - (table[full] - table[0])));

    // Symmetry: players 0 and 1 made interchangeable.
    auto swap01 = [](std::size_t m) {
      const std::size_t b0 = m & 1, b1 = (m >> 1) & 1;
      return (m & ~std::size_t{3}) | (b0 << 1) | b1;
    };
    std::vector<double> sym(table.size());
    for (std::size_t m = 0; m < table.size(); ++m) sym[m] = table[m] + table[swap01(m)];
    const auto phi_sym = exact_from_table(sym, n);
    worst_axiom = std::max(worst_axiom, std::abs(phi_sym[0] - phi_sym[1]));

    // Dummy: the last player adds a constant c to every coalition it joins.
    const std::size_t d = n - 1;
    const double c = 0.25 * static_cast<double>(game % 7) - 0.5;
    std::vector<double> dummy(table.size());
    for (std::size_t m = 0; m < table.size(); ++m) {
      const std::size_t without = m & ~(std::size_t{1} << d);
      dummy[m] = table[without] + ((m >> d) & 1 ? c : 0.0);
    }
    worst_axiom = std::max(worst_axiom, std::abs(exact_from_table(dummy, n)[d] - c));

    // Linearity.
    const auto other = random_table(n, rng);
    const double a = 1.5, b = -0.75;
    std::vector<double> mix(table.size());
    for (std::size_t m = 0; m < table.size(); ++m) mix[m] = a * table[m] + b * other[m];
    const auto phi_mix = exact_from_table(mix, n);
    const auto phi_other = exact_from_table(other, n);
    for (std::size_t i = 0; i < n; ++i) {
      worst_axiom = std::max(worst_axiom, std::abs(phi_mix[i] - (a * phi[i] + b * phi_other[i])));
    }
  }
  r.passed = worst_oracle <= kShapleyOracleTol && worst_axiom <= kAxiomTol;
  r.detail = format("100 games N=2..6, max |exact-oracle| %.3g (tol %g), max axiom error %.3g (tol %g)", worst_oracle,
                    kShapleyOracleTol, worst_axiom, kAxiomTol);
  return r;
}

// Criterion 2 -----------------------------------------------------------------

CriterionResult gradient_integrity() {
  CriterionResult r{2, "gradient_integrity", false, {}, 0.0};
  Rng rng = make_rng(kFixtureSeed, "acceptance-gradient");
  std::normal_distribution<double> nd;
  auto pick = [&](std::size_t lo, std::size_t hi) { return lo + uniform_index(rng, hi - lo + 1); };

  double worst_model = 0.0;
  for (int f = 0; f < 100; ++f) {
    const std::size_t D = pick(2, 6), C = pick(2, 5), B = pick(1, 8);
    const ModelSpec spec = f % 2 ? ModelSpec::mlp1(D, pick(2, 5), C) : ModelSpec::logistic(D, C);
    Matrix x(B, D);
    for (double &v : x.data) v = nd(rng);
    std::vector<int> y(B);
    for (int &v : y) v = static_cast<int>(uniform_index(rng, C));
    const LabeledBatch batch(std::move(x), std::move(y));
    std::vector<double> w(spec.param_count());
    for (double &v : w) v = nd(rng);

    const auto analytic = loss_and_grad(spec, ParamVector(w), batch).grad;
    const auto numeric = oracles::fd_gradient(
        [&](std::span<const double> p) {
          return loss_and_grad(spec, ParamVector(std::vector<double>(p.begin(), p.end())), batch).loss;
        },
        w, 1e-6);
    worst_model = std::max(worst_model, rel_err(analytic.span(), numeric));
  }

  double worst_latent = 0.0;
  for (int f = 0; f < 20; ++f) {
    DatasetSpec ds;
    ds.num_classes = 3 + static_cast<std::size_t>(f % 3);
    ds.input_dim = 4 + static_cast<std::size_t>(f % 4);
    ds.seed = derive_seed(kFixtureSeed, "acceptance-latent", static_cast<std::uint64_t>(f));
    const std::size_t d = 2 + static_cast<std::size_t>(f % 3), B = 2 + static_cast<std::size_t>(f % 4);
    const auto pool = sample_pool(ds, 10, ds.seed + 1);
    const Decoder dec = calibrate_decoder(pool, ds.num_classes, d, ds.seed + 2);
    const ModelSpec spec = ModelSpec::logistic(ds.input_dim, ds.num_classes);
    ParamVector w(spec.param_count()), g_ref(spec.param_count());
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = 0.5 * nd(rng);
      g_ref[i] = nd(rng);
    }
    Matrix z(B, d);
    for (double &v : z.data) v = nd(rng);
    std::vector<int> labels(B);
    for (int &v : labels) v = static_cast<int>(uniform_index(rng, ds.num_classes));

    const Matrix fine = latent_gradient(spec, w, dec, z, labels, g_ref, 1e-4);
    const Matrix coarse = latent_gradient(spec, w, dec, z, labels, g_ref, 1e-3);
    worst_latent = std::max(worst_latent, rel_err(fine.data, coarse.data));
  }

  r.passed = worst_model <= kGradRelTol && worst_latent <= kLatentStepRelTol;
  r.detail = format("100 model fixtures max rel err %.3g (tol %g); latent FD step 1e-4 vs 1e-3 max rel diff %.3g (tol %g)",
                    worst_model, kGradRelTol, worst_latent, kLatentStepRelTol);
  return r;
}

// Criterion 3 -----------------------------------------------------------------

CriterionResult normalization_contract() {
  CriterionResult r{3, "normalization_contract", false, {}, 0.0};
  Rng rng = make_rng(kFixtureSeed, "acceptance-normalize");
  std::normal_distribution<double> nd;
  int failures = 0, degenerate = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + uniform_index(rng, 20);
    std::vector<double> raw(n);
    if (k % 20 == 0) {
      std::fill(raw.begin(), raw.end(), nd(rng));
    } else {
      const double scale = std::pow(10.0, static_cast<double>(k % 7) - 3.0);
      for (double &v : raw) v = scale * nd(rng);
    }
    const bool flat = std::all_of(raw.begin(), raw.end(), [&](double v) { return v == raw[0]; });
    degenerate += flat;

    const auto shares = normalize_shares(raw);
    bool ok = shares.size() == n;
    for (double s : shares) ok = ok && s >= 0.0;
    ok = ok && std::abs(std::accumulate(shares.begin(), shares.end(), 0.0) - 1.0) <= kShareSumTol;
    const double lo = *std::min_element(shares.begin(), shares.end());
    if (flat) {
      for (double s : shares) ok = ok && std::abs(s - 1.0 / static_cast<double>(n)) <= kShareSumTol;
    } else {
      ok = ok && lo == 0.0;
    }
    ok = ok && rank_clients(shares) == rank_clients(raw);
    failures += !ok;
  }
  r.passed = failures == 0;
  r.detail = format("1000 vectors (%d degenerate), %d violations", degenerate, failures);
  return r;
}

// Criteria 4-9 share the desk scenario ---------------------------------------

struct SeedOutcome {
  double before = 0.0;
  double after = 0.0;
  double loo_before = 0.0;
  double loo_after = 0.0;
  double u0 = 0.0;
  double u1 = 0.0;
};

SeedOutcome outcome(const ExperimentReport &rep) {
  SeedOutcome o{rep.attacker_share_before(), rep.attacker_share_after(), 0.0, 0.0, rep.u0, rep.u1};
  for (const auto &ev : rep.evaluations) {
    if (ev.attack_free.evaluator != Evaluator::kLooRound) continue;
    o.loo_before = ev.attack_free.shares[ev.attack_free.index_of(rep.malicious)];
    o.loo_after = ev.attacked.shares[ev.attacked.index_of(rep.malicious)];
  }
  return o;
}

std::vector<SeedOutcome> run_seeds(const std::function<void(ExperimentConfig &)> &edit) {
  std::vector<SeedOutcome> out;
  for (int s = 1; s <= kSeeds; ++s) {
    ExperimentConfig c = default_scenario(static_cast<Seed>(s));
    edit(c);
    out.push_back(outcome(run_experiment(c)));
  }
  return out;
}

std::vector<double> column(const std::vector<SeedOutcome> &v, double SeedOutcome::*field) {
  std::vector<double> out;
  for (const auto &o : v) out.push_back(o.*field);
  return out;
}

std::vector<double> gains(const std::vector<SeedOutcome> &v, double SeedOutcome::*after, double SeedOutcome::*before) {
  std::vector<double> out;
  for (const auto &o : v) out.push_back(o.*after - o.*before);
  return out;
}

class AttackSuite {
 public:
  const std::map<AttackMethod, std::vector<SeedOutcome>> &methods() {
    if (methods_.empty()) {
      const auto start = Clock::now();
      for (AttackMethod m : {AttackMethod::kLatentOpt, AttackMethod::kLabelFlip, AttackMethod::kRandomNoise,
                             AttackMethod::kFreeRider}) {
        methods_[m] = run_seeds([m](ExperimentConfig &c) {
          c.attack = m;
          c.evaluators = {Evaluator::kFedsvExact, Evaluator::kLooRound};
        });
      }
      seconds_ = std::chrono::duration<double>(Clock::now() - start).count();
    }
    return methods_;
  }
  double seconds() const { return seconds_; }

 private:
  std::map<AttackMethod, std::vector<SeedOutcome>> methods_;
  double seconds_ = 0.0;
};

CriterionResult attack_effect(AttackSuite &suite) {
  CriterionResult r{4, "attack_effect", false, {}, 0.0};
  const auto &runs = suite.methods();
  const auto &lo = runs.at(AttackMethod::kLatentOpt);
  const double gain = median(gains(lo, &SeedOutcome::after, &SeedOutcome::before));
  const double lo_share = median(column(lo, &SeedOutcome::after));
  bool beats_all = true;
  std::string others;
  for (AttackMethod m : {AttackMethod::kLabelFlip, AttackMethod::kRandomNoise, AttackMethod::kFreeRider}) {
    const double share = median(column(runs.at(m), &SeedOutcome::after));
    beats_all = beats_all && lo_share > share;
    others += format(", %s %.4f", to_string(m).c_str(), share);
  }
  r.passed = gain >= kMinShareGain && beats_all && suite.seconds() < kAttackSeconds;
  r.detail = format("median gain %.4f (min %g); median share latent_opt %.4f%s; %.1fs of %gs", gain, kMinShareGain,
                    lo_share, others.c_str(), suite.seconds(), kAttackSeconds);
  return r;
}

CriterionResult utility_preservation(AttackSuite &suite) {
  CriterionResult r{5, "utility_preservation", false, {}, 0.0};
  const auto &runs = suite.methods();
  int kept = 0, degraded = 0;
  std::vector<double> lo_du, lf_du;
  for (const auto &o : runs.at(AttackMethod::kLatentOpt)) {
    lo_du.push_back(o.u1 - o.u0);
    kept += std::abs(o.u1 - o.u0) <= kDelta;
  }
  for (const auto &o : runs.at(AttackMethod::kLabelFlip)) {
    lf_du.push_back(o.u1 - o.u0);
    degraded += (o.u0 - o.u1) > kDelta;
  }
  r.passed = kept >= kUtilitySeedsRequired && degraded >= kUtilitySeedsRequired;
  r.detail = format("latent_opt within delta %d/5 dU %s; label_flip degraded %d/5 dU %s", kept, list(lo_du).c_str(),
                    degraded, list(lf_du).c_str());
  return r;
}

bool same_log(const TrainingLog &a, const TrainingLog &b) {
  if (a.rounds.size() != b.rounds.size() || a.final_utility != b.final_utility) return false;
  for (std::size_t t = 0; t < a.rounds.size(); ++t) {
    if (a.rounds[t].updates != b.rounds[t].updates || a.rounds[t].w_next != b.rounds[t].w_next) return false;
  }
  return true;
}

CriterionResult intensity_monotonicity() {
  CriterionResult r{6, "intensity_monotonicity", false, {}, 0.0};
  const std::vector<double> levels{0.0, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> med;
  bool utility_ok = true, zero_exact = true;
  for (double k : levels) {
    std::vector<double> shares;
    for (int s = 1; s <= kSeeds; ++s) {
      ExperimentConfig c = default_scenario(static_cast<Seed>(s));
      c.latent.intensity = k;
      const ExperimentRun run = run_experiment_full(c);
      shares.push_back(run.report.attacker_share_after());
      utility_ok = utility_ok && std::abs(run.report.u1 - run.report.u0) <= kDelta;
      if (k == 0.0) {
        const auto &p = run.report.primary();
        zero_exact = zero_exact && same_log(run.attack_free_log, run.attacked_log) &&
                     p.attack_free.raw == p.attacked.raw && p.attack_free.shares == p.attacked.shares;
      }
    }
    med.push_back(median(shares));
  }
  int inversions = 0;
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < med.size(); ++i) {
    if (med[i] < med[i - 1]) {
      ++inversions;
      worst_drop = std::max(worst_drop, med[i - 1] - med[i]);
    }
  }
  const bool monotone = inversions == 0 || (inversions == 1 && worst_drop <= kInversionAllowance);
  r.passed = monotone && utility_ok && zero_exact;
  r.detail = format("median share at 0/0.5/1/2/4x %s, inversions %d (max drop %.4f); utility within delta %s; 0x "
                    "identical %s",
                    list(med).c_str(), inversions, worst_drop, utility_ok ? "yes" : "no", zero_exact ? "yes" : "no");
  return r;
}

CriterionResult target_rank_asymmetry(AttackSuite &suite) {
  CriterionResult r{7, "target_rank_asymmetry", false, {}, 0.0};
  const double low = median(gains(suite.methods().at(AttackMethod::kLatentOpt), &SeedOutcome::after, &SeedOutcome::before));
  const auto top_runs = run_seeds([](ExperimentConfig &c) { c.target = TargetRule{1}; });
  const double top = median(gains(top_runs, &SeedOutcome::after, &SeedOutcome::before));
  r.passed = low > top;
  r.detail = format("median gain rank N %.4f vs rank 1 %.4f", low, top);
  return r;
}

CriterionResult trimming_stealth() {
  CriterionResult r{8, "trimming_stealth", false, {}, 0.0};
  auto f1s = [](AttackMethod m) {
    std::vector<double> out;
    double guess = 0.0;
    for (int s = 1; s <= kSeeds; ++s) {
      ExperimentConfig c = default_scenario(static_cast<Seed>(s));
      c.attack = m;
      c.noise_sigma_rel = kNoiseSigmaRel;
      c.defense = DefenseMode::kEnforce;
      c.tau = kTrimTau;
      const auto rep = run_experiment(c);
      out.push_back(rep.detection ? rep.detection->f1 : 0.0);
      const int n = static_cast<int>(rep.num_clients);
      const int k = static_cast<int>(std::ceil(kTrimTau * n - 1e-9));
      guess = random_guess_score(n, k, {rep.malicious}).f1;
    }
    return std::pair{out, guess};
  };
  const auto [lo, guess] = f1s(AttackMethod::kLatentOpt);
  const auto [noise, unused] = f1s(AttackMethod::kRandomNoise);
  (void)unused;
  r.passed = mean(lo) <= kStealthMaxF1 && mean(noise) >= kNoiseMinF1;
  r.detail = format("mean F1 latent_opt %.4f (max %g, random guess %.4f) per seed %s; random_noise sigma_rel %g "
                    "%.4f (min %g)",
                    mean(lo), kStealthMaxF1, guess, list(lo).c_str(), kNoiseSigmaRel, mean(noise), kNoiseMinF1);
  return r;
}

CriterionResult loo_robustness(AttackSuite &suite) {
  CriterionResult r{9, "loo_robustness", false, {}, 0.0};
  const auto g = gains(suite.methods().at(AttackMethod::kLatentOpt), &SeedOutcome::loo_after, &SeedOutcome::loo_before);
  const double m = median(g);
  r.passed = m >= kLooMinGain;
  r.detail = format("median loo_round share gain %.4f (min %g) per seed %s", m, kLooMinGain, list(g).c_str());
  return r;
}

// Criterion 10 ----------------------------------------------------------------

std::map<std::string, std::string> snapshot(const std::filesystem::path &root) {
  std::map<std::string, std::string> files;
  for (const auto &entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files[std::filesystem::relative(entry.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

CriterionResult determinism(const std::filesystem::path &scratch) {
  CriterionResult r{10, "determinism", false, {}, 0.0};
  auto produce = [&](const std::string &name) {
    const auto dir = scratch / name;
    std::filesystem::remove_all(dir);
    ExperimentConfig c = default_scenario(11);
    c.evaluators = {Evaluator::kFedsvExact, Evaluator::kFedsvMc, Evaluator::kLooRound};
    c.defense = DefenseMode::kMonitor;
    c.output_dir = (dir / "run").string();
    run_experiment(c);
    c.output_dir = (dir / "sweep").string();
    c.evaluators = {Evaluator::kFedsvExact};
    sweep(c, SweepAxis::kIntensity, {"0", "1", "2"});
    return snapshot(dir);
  };
  const auto a = produce("first");
  const auto b = produce("second");
  std::size_t differing = 0;
  for (const auto &[name, bytes] : a) {
    const auto it = b.find(name);
    differing += it == b.end() || it->second != bytes;
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  r.passed = !a.empty() && a.size() == b.size() && differing == 0;
  r.detail = format("%zu files per run, %zu differ", a.size(), differing);
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &options) {
  auto wanted = [&](int id) { return options.only.empty() || options.only.count(id) > 0; };
  std::filesystem::path scratch = options.scratch_dir;
  const bool own_scratch = scratch.empty();
  if (own_scratch) {
    scratch = std::filesystem::temp_directory_path() /
              format("attrfl-acceptance-%llu", static_cast<unsigned long long>(
                                                  Clock::now().time_since_epoch().count()));
  }

  AttackSuite suite;
  std::vector<CriterionResult> results;
  auto run = [&](int id, const char *name, const std::function<CriterionResult()> &fn, double budget = 0.0) {
    if (!wanted(id)) return;
    const auto start = Clock::now();
    CriterionResult res;
    try {
      res = fn();
    } catch (const std::exception &e) {
      res = CriterionResult{id, name, false, std::string("error: ") + e.what()};
    }
    res.id = id;
    res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (budget > 0.0 && res.seconds >= budget) {
      res.passed = false;
      res.detail += format("; exceeded %gs budget", budget);
    }
    if (options.on_result) options.on_result(res);
    results.push_back(std::move(res));
  };

  run(1, "shapley_correctness", shapley_correctness, kShapleySeconds);
  run(2, "gradient_integrity", gradient_integrity, kGradientSeconds);
  run(3, "normalization_contract", normalization_contract);
  run(4, "attack_effect", [&] { return attack_effect(suite); });
  run(5, "utility_preservation", [&] { return utility_preservation(suite); });
  run(6, "intensity_monotonicity", intensity_monotonicity);
  run(7, "target_rank_asymmetry", [&] { return target_rank_asymmetry(suite); });
  run(8, "trimming_stealth", trimming_stealth);
  run(9, "loo_robustness", [&] { return loo_robustness(suite); });
  run(10, "determinism", [&] {
    std::filesystem::create_directories(scratch);
    auto res = determinism(scratch);
    if (own_scratch) std::filesystem::remove_all(scratch);
    return res;
  });
  return results;
}

std::string format_result(const CriterionResult &result) {
  return format("criterion %d %s: %s %s (%.2fs)", result.id, result.name.c_str(), result.passed ? "PASS" : "FAIL",
                result.detail.c_str(), result.seconds);
}

bool all_passed(const std::vector<CriterionResult> &results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult &r) { return r.passed; });
}

}  // namespace attrfl
