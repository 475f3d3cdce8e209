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

#ifndef ATTRFL_PLOTS_HPP_
#define ATTRFL_PLOTS_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace attrfl {

struct ExperimentReport;
struct SweepResult;

// Stacked share bars, one per phase; each bar's segments span its full width.
std::string composition_svg(const ExperimentReport &report);

// Attacker share and final accuracy against intensity, one tick per point.
std::string intensity_svg(std::span<const double> intensities, std::span<const double> shares,
                          std::span<const double> accuracies);

// Attacker share before/after per category.
std::string grouped_bars_svg(const std::string &title, std::span<const std::string> categories,
                             std::span<const double> before, std::span<const double> after);

// composition.svg for a single experiment.
std::vector<std::filesystem::path> emit_plots(const ExperimentReport &report, const std::filesystem::path &dir);

// Sweep figures: intensity curve or grouped bars, depending on the axis.
std::vector<std::filesystem::path> emit_sweep_plots(const SweepResult &result, const std::filesystem::path &dir);

// Grouped before/after bars across stored reports, keyed by run id.
std::filesystem::path emit_comparison_plot(std::span<const ExperimentReport> reports, const std::filesystem::path &path);

// Re-emits figures from stored outputs under `dir`: composition.svg for a
// run directory, sweep figures plus per-point figures for a sweep directory.
// Figures go to `out_dir`, or next to their sources when it is empty.
std::vector<std::filesystem::path> replot(const std::filesystem::path &dir, const std::filesystem::path &out_dir = {});

}  // namespace attrfl

#endif  // ATTRFL_PLOTS_HPP_
