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

#ifndef ATTRFL_ACCEPTANCE_HPP_
#define ATTRFL_ACCEPTANCE_HPP_

#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace attrfl {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  // Criteria to run; empty runs all ten.
  std::set<int> only;
  // Scratch space for the determinism check. Defaults to a directory under
  // the system temp path, removed afterwards.
  std::filesystem::path scratch_dir;
  // Called as each criterion finishes.
  std::function<void(const CriterionResult &)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &options = {});

// "criterion <id> <name>: PASS|FAIL <detail> (<seconds>s)"
std::string format_result(const CriterionResult &result);

bool all_passed(const std::vector<CriterionResult> &results);

}  // namespace attrfl

#endif  // ATTRFL_ACCEPTANCE_HPP_
