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

#ifndef ATTRFL_RNG_HPP_
#define ATTRFL_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace attrfl {

using Rng = std::mt19937_64;
using Seed = std::uint64_t;

// Stream derivation rule: every random stream in a run is keyed by
// (master seed, role tag, client id, round) and mixed with splitmix64, so
// adding clients or rounds never perturbs an existing stream.
Seed derive_seed(Seed master, std::string_view tag, std::uint64_t a = 0, std::uint64_t b = 0);

inline Rng make_rng(Seed master, std::string_view tag, std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(derive_seed(master, tag, a, b));
}

double standard_normal(Rng &rng);

// Uniform index in [0, n).
std::size_t uniform_index(Rng &rng, std::size_t n);

}  // namespace attrfl

#endif  // ATTRFL_RNG_HPP_
