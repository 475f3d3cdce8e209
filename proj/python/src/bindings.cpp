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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "attrfl/attribution.hpp"
#include "attrfl/defense.hpp"
#include "attrfl/experiment.hpp"
#include "attrfl/oracles.hpp"

namespace py = pybind11;

namespace {

attrfl::ExperimentConfig config_from(const std::string &text, const py::dict &overrides) {
  auto cfg = text.empty() ? attrfl::default_scenario() : attrfl::ExperimentConfig::parse(text);
  for (const auto &[k, v] : overrides) cfg.set(py::str(k), py::str(v));
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "attrfl core bindings";

  py::register_exception<attrfl::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("normalize_shares", [](const std::vector<double> &raw) { return attrfl::normalize_shares(raw); },
        py::arg("raw"));
  m.def("rank_clients", [](const std::vector<double> &shares) { return attrfl::rank_clients(shares); },
        py::arg("shares"));

  m.def(
      "shapley_exact",
      [](std::size_t n, const std::function<double(std::uint64_t)> &v) { return attrfl::shapley_exact(n, v); },
      py::arg("num_players"), py::arg("value"), "Exact Shapley values; value(mask) scores a coalition bitmask.");
  m.def(
      "shapley_mc",
      [](std::size_t n, const std::function<double(std::uint64_t)> &v, std::size_t perms, std::uint64_t seed) {
        return attrfl::shapley_mc(n, v, perms, seed);
      },
      py::arg("num_players"), py::arg("value"), py::arg("num_permutations"), py::arg("seed"));
  m.def(
      "shapley_bruteforce",
      [](const std::vector<double> &table, std::size_t n) { return attrfl::oracles::shapley_bruteforce(table, n); },
      py::arg("table"), py::arg("num_players"));

  m.def(
      "random_guess_f1",
      [](int n, int trimmed, const std::set<int> &malicious) {
        return attrfl::random_guess_score(n, trimmed, malicious).f1;
      },
      py::arg("num_clients"), py::arg("trimmed_per_round"), py::arg("malicious"));

  m.def(
      "default_config", [] { return attrfl::default_scenario().to_text(); },
      "Canonical text of the desk-scale default scenario.");
  m.def(
      "config_hash", [](const std::string &text, const py::dict &overrides) { return config_from(text, overrides).hash(); },
      py::arg("config") = "", py::arg("overrides") = py::dict());

  m.def(
      "run_experiment",
      [](const std::string &text, const py::dict &overrides) {
        const auto cfg = config_from(text, overrides);
        attrfl::ExperimentReport report;
        {
          py::gil_scoped_release release;
          report = attrfl::run_experiment(cfg);
        }
        return attrfl::report_to_json(report);
      },
      py::arg("config") = "", py::arg("overrides") = py::dict(),
      "Runs one paired experiment and returns the report as JSON text.");

  m.attr("CSV_HEADER") = attrfl::kCsvHeader;
}
