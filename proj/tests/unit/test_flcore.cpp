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

#include <filesystem>
#include <stdexcept>

#include "attrfl/flcore.hpp"
#include "attrfl/oracles.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace attrfl;

namespace {

ParamVector vec(std::initializer_list<double> v) { return ParamVector(std::vector<double>(v)); }

void check_same_log(const TrainingLog &a, const TrainingLog &b) {
  REQUIRE(a.rounds.size() == b.rounds.size());
  CHECK(a.initial_utility == b.initial_utility);
  CHECK(a.final_utility == b.final_utility);
  CHECK(a.fingerprint == b.fingerprint);
  for (std::size_t t = 0; t < a.rounds.size(); ++t) {
    const auto &x = a.rounds[t], &y = b.rounds[t];
    CHECK(x.t == y.t);
    CHECK(x.w_t == y.w_t);
    CHECK(x.client_ids == y.client_ids);
    CHECK(x.updates == y.updates);
    CHECK(x.n == y.n);
    CHECK(x.kept == y.kept);
    CHECK(x.w_next == y.w_next);
    CHECK(x.test_utility_after == y.test_utility_after);
    CHECK(x.trim.has_value() == y.trim.has_value());
    if (x.trim && y.trim) {
      CHECK(x.trim->trimmed == y.trim->trimmed);
      CHECK(x.trim->distances == y.trim->distances);
    }
    CHECK(x.plausibility == y.plausibility);
  }
}

class ThrowingBehavior : public ClientBehavior {
 public:
  std::string name() const override { return "broken"; }
  ParamVector update(const ClientContext &) override { throw std::runtime_error("boom"); }
};

class HistoryProbe : public ClientBehavior {
 public:
  std::vector<std::size_t> seen;
  std::string name() const override { return "probe"; }
  ParamVector update(const ClientContext &ctx) override {
    seen.push_back(ctx.history.size());
    CHECK(ctx.w_t() == ctx.history.back());
    return ParamVector(ctx.w_t().size());
  }
};

}  // namespace

TEST_SUITE("flcore") {
  TEST_CASE("weighted_aggregate arithmetic") {
    const std::vector<ParamVector> opposite{vec({1, -2, 3}), vec({-1, 2, -3})};
    const std::vector<std::size_t> equal{5, 5};
    CHECK(weighted_aggregate(opposite, equal) == ParamVector(3));

    const std::vector<ParamVector> single{vec({0.1, 0.2})};
    const std::vector<std::size_t> one{7};
    CHECK(weighted_aggregate(single, one) == vec({0.1, 0.2}));

    const std::vector<ParamVector> pair{vec({4, 0}), vec({0, 0})};
    const std::vector<std::size_t> n{1, 3};
    CHECK(weighted_aggregate(pair, n) == vec({1, 0}));

    CHECK_THROWS(weighted_aggregate(std::vector<ParamVector>{}, std::vector<std::size_t>{}));
    CHECK_THROWS(weighted_aggregate(pair, std::vector<std::size_t>{0, 0}));
    CHECK_THROWS(weighted_aggregate(pair, std::vector<std::size_t>{1}));
  }

  TEST_CASE("weighted_aggregate is linear in the updates") {
    Rng rng(1);
    std::vector<ParamVector> a, b, sum;
    for (int i = 0; i < 4; ++i) {
      a.push_back(testing::random_params(6, rng));
      b.push_back(testing::random_params(6, rng));
      sum.push_back(2.0 * a.back() + b.back());
    }
    const std::vector<std::size_t> n{3, 1, 4, 1};
    const auto lhs = weighted_aggregate(sum, n);
    const auto rhs = 2.0 * weighted_aggregate(a, n) + weighted_aggregate(b, n);
    for (std::size_t i = 0; i < 6; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-13));
  }

  TEST_CASE("benign update with zero learning rate is zero") {
    const auto setup = testing::small_setup(3, 3, 2, 1, 4);
    const auto w = init_params(setup.spec, 1);
    CHECK(benign_local_update(setup.spec, w, setup.shards[0], SgdConfig{2, 16, 0.0}, 9) == ParamVector(w.size()));
    const auto u = benign_local_update(setup.spec, w, setup.shards[0], SgdConfig{2, 16, 0.1}, 9);
    CHECK(u.norm() > 0.0);
    CHECK(u == sgd_train(setup.spec, w, setup.shards[0].data, SgdConfig{2, 16, 0.1}, 9) - w);
  }

  TEST_CASE("one round with one client equals local training") {
    auto setup = testing::small_setup(2, 3, 2, 1, 5);
    setup.shards.resize(1);
    const auto log = run_training(setup, testing::benign_clients(1));
    REQUIRE(log.rounds.size() == 1);
    const auto w0 = init_params(setup.spec, model_init_seed(setup.master_seed));
    const auto local =
        sgd_train(setup.spec, w0, setup.shards[0].data, setup.sgd, client_train_seed(setup.master_seed, 0, 1));
    const auto &w1 = log.rounds[0].w_next;
    for (std::size_t i = 0; i < w1.size(); ++i) CHECK(w1[i] == doctest::Approx(local[i]).epsilon(1e-14));
  }

  TEST_CASE("training is deterministic for a fixed seed") {
    const auto setup = testing::small_setup(4, 4, 2, 3, 6);
    check_same_log(run_training(setup, testing::benign_clients(4)), run_training(setup, testing::benign_clients(4)));
    auto other = setup;
    other.master_seed = 7;
    CHECK_FALSE(run_training(other, testing::benign_clients(4)).rounds[0].updates ==
                run_training(setup, testing::benign_clients(4)).rounds[0].updates);
  }

  TEST_CASE("round records are consistent") {
    const auto setup = testing::small_setup(3, 3, 2, 3, 8);
    const auto log = run_training(setup, testing::benign_clients(3));
    REQUIRE(log.rounds.size() == 3);
    for (std::size_t t = 0; t < log.rounds.size(); ++t) {
      const auto &r = log.rounds[t];
      CHECK(r.t == static_cast<int>(t) + 1);
      CHECK(r.client_ids == std::vector<int>{0, 1, 2});
      CHECK(r.w_next == r.w_t + weighted_aggregate(r.updates, r.n));
      CHECK(r.test_utility_after == utility(setup.spec, r.w_next, setup.test));
      CHECK(r.test_utility_after == oracles::reference_accuracy(setup.spec, r.w_next.span(), setup.test));
      CHECK_FALSE(r.trim.has_value());
      if (t > 0) CHECK(r.w_t == log.rounds[t - 1].w_next);
    }
    CHECK(log.final_utility == log.rounds.back().test_utility_after);
  }

  TEST_CASE("behaviors see only broadcast models") {
    auto setup = testing::small_setup(2, 3, 2, 3, 9);
    std::vector<std::unique_ptr<ClientBehavior>> behaviors;
    behaviors.push_back(std::make_unique<BenignBehavior>());
    auto probe = std::make_unique<HistoryProbe>();
    auto *raw = probe.get();
    behaviors.push_back(std::move(probe));
    run_training(setup, behaviors);
    CHECK(raw->seen == std::vector<std::size_t>{1, 2, 3});
  }

  TEST_CASE("a throwing client aborts with the round attached") {
    auto setup = testing::small_setup(2, 3, 2, 2, 10);
    std::vector<std::unique_ptr<ClientBehavior>> behaviors;
    behaviors.push_back(std::make_unique<BenignBehavior>());
    behaviors.push_back(std::make_unique<ThrowingBehavior>());
    try {
      run_training(setup, behaviors);
      FAIL("expected an exception");
    } catch (const std::runtime_error &e) {
      const std::string msg = e.what();
      CHECK(msg.find("round 1") != std::string::npos);
      CHECK(msg.find("client 1") != std::string::npos);
    }
    CHECK_THROWS(run_training(setup, testing::benign_clients(1)));
  }

  TEST_CASE("benign federation reaches high utility") {
    const auto setup = testing::small_setup(5, 4, 2, 20, 11);
    const auto log = run_training(setup, testing::benign_clients(5));
    CHECK(log.final_utility >= 0.85);
    CHECK(log.final_utility > log.initial_utility);
  }

  TEST_CASE("enforced trimming aggregates kept clients only") {
    auto setup = testing::small_setup(5, 4, 2, 2, 12);
    setup.defense.mode = DefenseMode::kEnforce;
    setup.defense.tau = 0.1;
    const auto log = run_training(setup, testing::benign_clients(5));
    for (const auto &r : log.rounds) {
      REQUIRE(r.trim.has_value());
      CHECK(r.trim->trimmed.size() == 1);
      CHECK(r.plausibility.size() == 5);
      std::vector<ParamVector> kept;
      std::vector<std::size_t> n;
      for (std::size_t i = 0; i < 5; ++i) {
        CHECK(r.kept[i] == (r.trim->trimmed.count(r.client_ids[i]) == 0));
        if (r.kept[i]) {
          kept.push_back(r.updates[i]);
          n.push_back(r.n[i]);
        }
      }
      CHECK(r.w_next == r.w_t + weighted_aggregate(kept, n));
    }

    setup.defense.mode = DefenseMode::kMonitor;
    const auto monitored = run_training(setup, testing::benign_clients(5));
    const auto plain = run_training(testing::small_setup(5, 4, 2, 2, 12), testing::benign_clients(5));
    for (std::size_t t = 0; t < plain.rounds.size(); ++t) {
      CHECK(monitored.rounds[t].w_next == plain.rounds[t].w_next);
      CHECK(monitored.rounds[t].trim.has_value());
    }
  }

  TEST_CASE("training log round-trips through JSON lines") {
    auto setup = testing::small_setup(3, 3, 2, 2, 13);
    setup.defense.mode = DefenseMode::kMonitor;
    setup.fingerprint = "abc123";
    const auto log = run_training(setup, testing::benign_clients(3));
    const auto path = std::filesystem::temp_directory_path() / "attrfl_log_test.jsonl";
    write_log(path, log);
    check_same_log(log, read_log(path));
    std::filesystem::remove(path);
  }

  TEST_CASE("stream seeds are distinct per role, client and round") {
    CHECK(client_train_seed(1, 0, 1) != client_behavior_seed(1, 0, 1));
    CHECK(client_train_seed(1, 0, 1) != client_train_seed(1, 1, 1));
    CHECK(client_train_seed(1, 0, 1) != client_train_seed(1, 0, 2));
    CHECK(client_train_seed(1, 0, 1) != client_train_seed(2, 0, 1));
    CHECK(client_train_seed(3, 2, 5) == client_train_seed(3, 2, 5));
  }
}
