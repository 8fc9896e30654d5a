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

#include "kgre/optimizer.h"

#include <cmath>

#include "kgre/error.h"

namespace kgre {

AdamW::AdamW(ParameterStore& store, AdamWOptions options)
    : store_(store), options_(std::move(options)) {
  for (size_t i = 0; i < store.size(); ++i) {
    const Parameter& p = store[i];
    if (p.group < 0 || static_cast<size_t>(p.group) >= options_.learning_rates.size()) {
      throw Error("no learning rate for group of parameter " + p.name);
    }
    m_.emplace_back(p.value.shape());
    v_.emplace_back(p.value.shape());
  }
}

void AdamW::Step(const std::vector<Tensor>& grads) {
  if (grads.size() != store_.size()) throw Error("AdamW: gradient count mismatch");
  ++step_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
  for (size_t i = 0; i < store_.size(); ++i) {
    if (grads[i].size() == 0) continue;
    Parameter& p = store_[i];
    const double lr = options_.learning_rates[p.group];
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (size_t k = 0; k < p.value.size(); ++k) {
      const double g = grads[i][k];
      m[k] = options_.beta1 * m[k] + (1.0 - options_.beta1) * g;
      v[k] = options_.beta2 * v[k] + (1.0 - options_.beta2) * g * g;
      const double update = (m[k] / c1) / (std::sqrt(v[k] / c2) + options_.epsilon);
      p.value[k] -= lr * (update + options_.weight_decay * p.value[k]);
    }
  }
}

double ClipGradientNorm(std::vector<Tensor>& grads, double max_norm) {
  double sq = 0.0;
  for (const Tensor& g : grads) {
    for (double v : g.values()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (Tensor& g : grads) {
      for (double& v : g.values()) v *= scale;
    }
  }
  return norm;
}

}  // namespace kgre
