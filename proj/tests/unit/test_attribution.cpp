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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "attrfl/attribution.hpp"
#include "attrfl/oracles.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace attrfl;

namespace {

std::vector<double> random_table(std::size_t n, Rng &rng) {
  std::vector<double> table(std::size_t{1} << n);
  for (double &v : table) v = standard_normal(rng);
  return table;
}

CoalitionValueFn from_table(const std::vector<double> &table) {
  return [&table](std::uint64_t mask) { return table[mask]; };
}

CoalitionValueFn additive(std::vector<double> c) {
  return [c](std::uint64_t mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (mask >> i & 1) s += c[i];
    }
    return s;
  };
}

// A one-round log whose updates are given directly.
TrainingLog handmade_log(const ParamVector &w, std::vector<ParamVector> updates, std::vector<std::size_t> n,
                         const ModelSpec &spec, const LabeledBatch &test) {
  RoundRecord r;
  r.t = 1;
  r.w_t = w;
  for (std::size_t i = 0; i < updates.size(); ++i) r.client_ids.push_back(static_cast<int>(i));
  r.kept.assign(updates.size(), true);
  r.w_next = w + weighted_aggregate(updates, n);
  r.test_utility_after = utility(spec, r.w_next, test);
  r.updates = std::move(updates);
  r.n = std::move(n);
  TrainingLog log;
  log.initial_utility = utility(spec, w, test);
  log.final_utility = r.test_utility_after;
  log.rounds.push_back(std::move(r));
  return log;
}

BehaviorFactory benign_factory() {
  return [](const ClientShard &) -> std::unique_ptr<ClientBehavior> { return std::make_unique<BenignBehavior>(); };
}

}  // namespace

TEST_SUITE("attribution") {
  TEST_CASE("coalition values follow the round definition") {
    const auto setup = testing::small_setup(3, 3, 2, 2, 1);
    const auto log = run_training(setup, testing::benign_clients(3));
    const auto &rec = log.rounds[1];
    const auto cu = CoalitionUtility::from_round(rec, setup.spec, setup.test);
    CHECK(cu.num_players() == 3);
    CHECK(coalition_value(cu, std::vector<int>{}) == utility(setup.spec, rec.w_t, setup.test));
    CHECK(coalition_value(cu, std::vector<int>{0, 1, 2}) == rec.test_utility_after);
    CHECK(coalition_value(cu, std::vector<int>{1}) == utility(setup.spec, rec.w_t + rec.updates[1], setup.test));
    CHECK(cu.value(0b101) == coalition_value(cu, std::vector<int>{0, 2}));
    CHECK_THROWS(coalition_value(cu, std::vector<int>{3}));
  }

  TEST_CASE("shapley_exact on small games") {
    const std::vector<double> c{0.3, -1.2, 2.0, 0.0, 5.5};
    const auto phi = shapley_exact(5, additive(c));
    for (std::size_t i = 0; i < 5; ++i) CHECK(phi[i] == doctest::Approx(c[i]).epsilon(1e-14));

    const std::vector<double> table{0, 1, 2, 4};
    const auto two = shapley_exact(2, from_table(table));
    CHECK(two[0] == doctest::Approx(1.5));
    CHECK(two[1] == doctest::Approx(2.5));

    CHECK_THROWS_AS(shapley_exact(kMaxExactPlayers + 1, additive({})), std::length_error);
  }

  TEST_CASE("shapley_exact matches permutation enumeration") {
    Rng rng(2);
    for (int k = 0; k < 20; ++k) {
      const auto table = random_table(5, rng);
      const auto exact = shapley_exact(5, from_table(table));
      const auto brute = oracles::shapley_bruteforce(table, 5);
      for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(exact[i] - brute[i]) <= 1e-12);
      const double total = std::accumulate(exact.begin(), exact.end(), 0.0);
      CHECK(std::abs(total - (table.back() - table.front())) <= 1e-12);
    }
  }

  TEST_CASE("shapley_mc converges, is exact on additive games and seeded") {
    Rng rng(3);
    const auto table = random_table(5, rng);
    const auto exact = shapley_exact(5, from_table(table));
    const auto mc = shapley_mc(5, from_table(table), 20000, 4);
    const auto [lo, hi] = std::minmax_element(table.begin(), table.end());
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(mc[i] - exact[i]) <= 0.01 * (*hi - *lo));

    const std::vector<double> c{1, 2, 3, 4};
    const auto one = shapley_mc(4, additive(c), 1, 5);
    for (std::size_t i = 0; i < 4; ++i) CHECK(one[i] == doctest::Approx(c[i]).epsilon(1e-14));

    CHECK(shapley_mc(5, from_table(table), 50, 6) == shapley_mc(5, from_table(table), 50, 6));
    CHECK_FALSE(shapley_mc(5, from_table(table), 50, 6) == shapley_mc(5, from_table(table), 50, 7));
    CHECK_THROWS(shapley_mc(5, from_table(table), 0, 6));
  }

  TEST_CASE("normalize_shares shifts by the minimum") {
    const auto s = normalize_shares(std::vector<double>{-1, 0, 3});
    CHECK(s[0] == 0.0);
    CHECK(s[1] == doctest::Approx(0.2));
    CHECK(s[2] == doctest::Approx(0.8));
    const auto u = normalize_shares(std::vector<double>{5, 5, 5});
    for (double v : u) CHECK(v == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS(normalize_shares(std::vector<double>{}));

    Rng rng(7);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> raw(6);
      for (double &v : raw) v = standard_normal(rng);
      const auto sh = normalize_shares(raw);
      CHECK(*std::min_element(sh.begin(), sh.end()) == 0.0);
      CHECK(std::abs(std::accumulate(sh.begin(), sh.end(), 0.0) - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("rank_clients orders by share with ties to the lower position") {
    CHECK(rank_clients(std::vector<double>{0.5, 0.3, 0.2}) == std::vector<int>{1, 2, 3});
    CHECK(rank_clients(std::vector<double>{0.4, 0.4, 0.2}) == std::vector<int>{1, 2, 3});
    CHECK(rank_clients(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == std::vector<int>{1, 2, 3, 4});
    CHECK(rank_clients(std::vector<double>{0.1, 0.6, 0.3}) == std::vector<int>{3, 1, 2});
  }

  TEST_CASE("make_report and index_of") {
    const auto r = make_report(Evaluator::kLooRound, {4, 7, 9}, {-1, 0, 3});
    CHECK(r.size() == 3);
    CHECK(r.index_of(7) == 1);
    CHECK(r.ranks == std::vector<int>{3, 2, 1});
    CHECK_THROWS(r.index_of(5));
    std::ostringstream out;
    write_attribution_table(out, r);
    CHECK(out.str().rfind("evaluator,client_id,raw,share,rank\n", 0) == 0);
  }

  TEST_CASE("evaluator names round-trip") {
    for (auto e : {Evaluator::kFedsvExact, Evaluator::kFedsvMc, Evaluator::kLooRound, Evaluator::kLooRetrain}) {
      CHECK(parse_evaluator(to_string(e)) == e);
    }
    CHECK_THROWS(parse_evaluator("banzhaf"));
  }

  TEST_CASE("fedsv sums per-round values and is efficient") {
    const auto setup = testing::small_setup(4, 4, 2, 3, 8);
    const auto log = run_training(setup, testing::benign_clients(4));
    const auto rep = fedsv(log, setup.spec, setup.test);
    CHECK(rep.evaluator == Evaluator::kFedsvExact);
    std::vector<double> expected(4, 0.0);
    double gain = 0.0;
    for (const auto &rec : log.rounds) {
      const auto phi = shapley_exact(CoalitionUtility::from_round(rec, setup.spec, setup.test));
      for (std::size_t i = 0; i < 4; ++i) expected[i] += phi[i];
      gain += rec.test_utility_after - utility(setup.spec, rec.w_t, setup.test);
    }
    for (std::size_t i = 0; i < 4; ++i) CHECK(rep.raw[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    CHECK(std::accumulate(rep.raw.begin(), rep.raw.end(), 0.0) == doctest::Approx(gain).epsilon(1e-12));

    FedsvOptions mc;
    mc.exact = false;
    mc.mc_permutations = 30;
    mc.seed = 2;
    const auto a = fedsv(log, setup.spec, setup.test, mc);
    CHECK(a.evaluator == Evaluator::kFedsvMc);
    CHECK(a.raw == fedsv(log, setup.spec, setup.test, mc).raw);
  }

  TEST_CASE("identical clients get equal values") {
    const auto setup = testing::small_setup(3, 3, 2, 1, 9);
    const auto w = init_params(setup.spec, 1);
    const auto u = benign_local_update(setup.spec, w, setup.shards[0], setup.sgd, 5);
    const auto v = benign_local_update(setup.spec, w, setup.shards[2], setup.sgd, 6);
    const auto log = handmade_log(w, {u, u, v}, {60, 60, 60}, setup.spec, setup.test);
    for (const auto &rep : {fedsv(log, setup.spec, setup.test), loo_round(log, setup.spec, setup.test)}) {
      CHECK(rep.raw[0] == rep.raw[1]);
      CHECK(rep.ranks[0] + 1 == rep.ranks[1]);
    }
  }

  TEST_CASE("loo_round dummy client in a null round scores zero") {
    const auto setup = testing::small_setup(3, 3, 2, 1, 10);
    const auto w = init_params(setup.spec, 2);
    const auto log = handmade_log(w, {ParamVector(w.size()), ParamVector(w.size()), ParamVector(w.size())},
                                  {10, 20, 30}, setup.spec, setup.test);
    for (double v : loo_round(log, setup.spec, setup.test).raw) CHECK(v == 0.0);
  }

  TEST_CASE("loo_round matches direct recomputation") {
    for (Seed s : {11u, 12u, 13u}) {
      const auto setup = testing::small_setup(3, 3, 2, 4, s);
      const auto log = run_training(setup, testing::benign_clients(3));
      const auto rep = loo_round(log, setup.spec, setup.test);
      const auto ref = oracles::loo_recompute(log, setup.spec, setup.test);
      for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(rep.raw[i] - ref[i]) <= 1e-12);
    }
  }

  TEST_CASE("trimmed clients are not players") {
    auto setup = testing::small_setup(5, 4, 2, 2, 14);
    setup.defense.mode = DefenseMode::kEnforce;
    const auto log = run_training(setup, testing::benign_clients(5));
    const auto rep = fedsv(log, setup.spec, setup.test);
    std::vector<double> expected(5, 0.0);
    for (const auto &rec : log.rounds) {
      const auto cu = CoalitionUtility::from_round(rec, setup.spec, setup.test);
      CHECK(cu.num_players() == 4);
      const auto phi = shapley_exact(cu);
      std::size_t p = 0;
      for (std::size_t i = 0; i < 5; ++i) {
        if (rec.kept[i]) expected[i] += phi[p++];
      }
    }
    for (std::size_t i = 0; i < 5; ++i) CHECK(rep.raw[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  }

  TEST_CASE("loo_retrain on duplicated and sole-holder clients") {
    // Full-batch local training makes the shuffle irrelevant.
    auto setup = testing::small_setup(3, 3, 1, 5, 15);
    setup.sgd = SgdConfig{2, 1000, 0.3};
    setup.shards[1].data = setup.shards[0].data;
    setup.shards[1].class_counts = setup.shards[0].class_counts;
    const double full = run_training(setup, testing::benign_clients(3)).final_utility;
    CHECK(std::abs(loo_retrain(setup, benign_factory(), 1, full)) <= 0.02);
    CHECK(loo_retrain(setup, benign_factory(), 2, full) > 0.0);
    CHECK_THROWS(loo_retrain(setup, benign_factory(), 9, full));

    auto pair = testing::small_setup(2, 3, 2, 3, 16);
    pair.sgd = SgdConfig{2, 1000, 0.3};
    pair.shards[1].data = pair.shards[0].data;
    const auto rep = loo_retrain_report(pair, benign_factory());
    CHECK(rep.raw[0] == doctest::Approx(rep.raw[1]).epsilon(1e-9));
  }
}
