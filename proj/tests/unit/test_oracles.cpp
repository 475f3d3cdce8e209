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

#include <cmath>

#include "attrfl/attribution.hpp"
#include "attrfl/oracles.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace attrfl;

TEST_SUITE("oracles") {
  TEST_CASE("fd_gradient on analytic functions") {
    const std::vector<double> x{0.3, -1.7, 2.2, 0.0};
    const auto sq = oracles::fd_gradient(
        [](std::span<const double> v) {
          double s = 0.0;
          for (double e : v) s += e * e;
          return s;
        },
        x, 1e-5);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(sq[i] - 2 * x[i]) <= 1e-6);

    for (double g : oracles::fd_gradient([](std::span<const double>) { return 4.2; }, x, 1e-5)) CHECK(g == 0.0);

    const auto sn = oracles::fd_gradient(
        [](std::span<const double> v) {
          double s = 0.0;
          for (double e : v) s += std::sin(e);
          return s;
        },
        x, 1e-5);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(sn[i] - std::cos(x[i])) <= 1e-6);

    CHECK_THROWS(oracles::fd_gradient([](std::span<const double>) { return 0.0; }, x, 0.0));
  }

  TEST_CASE("shapley_bruteforce basics") {
    const std::vector<double> additive{0, 2, -1, 1};
    const auto phi = oracles::shapley_bruteforce(additive, 2);
    CHECK(phi[0] == doctest::Approx(2.0));
    CHECK(phi[1] == doctest::Approx(-1.0));

    const std::vector<double> single{0.25, 1.0};
    CHECK(oracles::shapley_bruteforce(single, 1) == std::vector<double>{0.75});

    CHECK_THROWS(oracles::shapley_bruteforce(std::vector<double>(3), 2));
    CHECK_THROWS(oracles::shapley_bruteforce(std::vector<double>(std::size_t{1} << 9), 9));
  }

  TEST_CASE("shapley_bruteforce agrees with shapley_exact on random tables") {
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
      const std::size_t n = 2 + static_cast<std::size_t>(k % 5);
      std::vector<double> table(std::size_t{1} << n);
      for (double &v : table) v = standard_normal(rng);
      const auto brute = oracles::shapley_bruteforce(table, n);
      const auto exact = shapley_exact(n, [&](std::uint64_t m) { return table[m]; });
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(brute[i] - exact[i]) <= 1e-12);
    }
  }

  TEST_CASE("reference_accuracy agrees with the model code") {
    Rng rng(2);
    for (const auto &spec : {ModelSpec::logistic(3, 4), ModelSpec::mlp1(3, 5, 4)}) {
      const auto batch = testing::random_batch(200, 3, 4, rng);
      const auto p = testing::random_params(spec.param_count(), rng);
      CHECK(oracles::reference_accuracy(spec, p.span(), batch) == accuracy(spec, p, batch));
    }
  }
}
