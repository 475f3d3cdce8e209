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

// Acceptance suite runner: one line per criterion, nonzero exit on failure.
#include <cstring>
#include <iostream>
#include <string>

#include "attrfl/acceptance.hpp"

int main(int argc, char **argv) {
  attrfl::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--scratch") == 0 && i + 1 < argc) {
      opts.scratch_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      opts.only.insert(std::stoi(argv[++i]));
    } else {
      std::cerr << "usage: attrfl_acceptance [--scratch DIR] [--only ID]...\n";
      return 2;
    }
  }
  opts.on_result = [](const attrfl::CriterionResult &r) { std::cout << attrfl::format_result(r) << std::endl; };
  const bool ok = attrfl::all_passed(attrfl::run_acceptance(opts));
  std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
  return ok ? 0 : 1;
}
