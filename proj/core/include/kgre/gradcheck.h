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

#ifndef KGRE_GRADCHECK_H_
#define KGRE_GRADCHECK_H_

#include <functional>
#include <span>
#include <vector>

#include "kgre/tape.h"

namespace kgre {

// Builds a scalar on the given tape from the given leaves.
using TapeFunction = std::function<Var(Tape&, std::span<const Var>)>;

// Largest per-coordinate relative error between reverse-mode gradients and
// central differences (f(x+eps) - f(x-eps)) / (2 eps). The denominator is
// max(|analytic|, |numeric|) clamped below at 1e-8. Throws on non-finite
// values.
double CheckGradients(const TapeFunction& fn, std::vector<Tensor> inputs,
                      double eps = 1e-5);

// Same comparison with respect to parameters, perturbed in place and
// restored before returning.
double CheckParameterGradients(const std::function<Var(Tape&)>& fn,
                               std::span<Parameter* const> params,
                               double eps = 1e-5);

}  // namespace kgre

#endif  // KGRE_GRADCHECK_H_
