// Copyright 2026 The kgre Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KGRE_GRADCHECK_SUITE_H_
#define KGRE_GRADCHECK_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace kgre {

struct GradientCheckRow {
  std::string name;
  uint64_t seed = 0;
  double max_error = 0.0;
};

// Names of the built-in checks: every differentiable kernel, the losses and
// the composite heads.
const std::vector<std::string>& GradientCheckNames();

// Runs one named check on random inputs drawn from `seed`.
double RunGradientCheck(const std::string& name, uint64_t seed);

// Every check on seeds base_seed .. base_seed + seeds - 1.
std::vector<GradientCheckRow> RunGradientSuite(size_t seeds, uint64_t base_seed = 1);

}  // namespace kgre

#endif  // KGRE_GRADCHECK_SUITE_H_
