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

#ifndef KGRE_OPTIMIZER_H_
#define KGRE_OPTIMIZER_H_

#include <vector>

#include "kgre/tape.h"

namespace kgre {

struct AdamWOptions {
  std::vector<double> learning_rates;  // indexed by parameter group
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

// Adam with decoupled weight decay and per-group learning rates.
class AdamW {
 public:
  AdamW(ParameterStore& store, AdamWOptions options);

  // grads[i] belongs to store[i]; an empty tensor means no gradient.
  void Step(const std::vector<Tensor>& grads);

  size_t steps() const { return step_; }
  const AdamWOptions& options() const { return options_; }

 private:
  ParameterStore& store_;
  AdamWOptions options_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  size_t step_ = 0;
};

// Scales grads in place so their joint L2 norm is at most max_norm.
// Returns the norm before clipping.
double ClipGradientNorm(std::vector<Tensor>& grads, double max_norm);

}  // namespace kgre

#endif  // KGRE_OPTIMIZER_H_
