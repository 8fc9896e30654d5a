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

#include "kgre/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "kgre/error.h"

namespace kgre {
namespace {

double RelativeError(double analytic, double numeric) {
  if (!std::isfinite(analytic) || !std::isfinite(numeric)) {
    throw Error("gradient check hit a non-finite value");
  }
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

double ScalarValue(Var v) {
  if (v.value().size() != 1) throw ShapeError("gradient check needs a scalar function");
  const double x = v.value()[0];
  if (!std::isfinite(x)) throw Error("gradient check hit a non-finite value");
  return x;
}

}  // namespace

double CheckGradients(const TapeFunction& fn, std::vector<Tensor> inputs, double eps) {
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (const Tensor& t : inputs) leaves.push_back(tape.Leaf(t));
    Var out = fn(tape, leaves);
    ScalarValue(out);
    tape.Backward(out);
    for (const Var& v : leaves) analytic.push_back(tape.Grad(v));
  }
  auto evaluate = [&]() {
    Tape tape;
    std::vector<Var> leaves;
    for (const Tensor& t : inputs) leaves.push_back(tape.Constant(t));
    return ScalarValue(fn(tape, leaves));
  };
  double worst = 0.0;
  for (size_t q = 0; q < inputs.size(); ++q) {
    for (size_t i = 0; i < inputs[q].size(); ++i) {
      const double saved = inputs[q][i];
      inputs[q][i] = saved + eps;
      const double up = evaluate();
      inputs[q][i] = saved - eps;
      const double down = evaluate();
      inputs[q][i] = saved;
      worst = std::max(worst, RelativeError(analytic[q][i], (up - down) / (2 * eps)));
    }
  }
  return worst;
}

double CheckParameterGradients(const std::function<Var(Tape&)>& fn,
                               std::span<Parameter* const> params, double eps) {
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (Parameter* p : params) vars.push_back(tape.Param(*p));
    Var out = fn(tape);
    ScalarValue(out);
    tape.Backward(out);
    for (const Var& v : vars) analytic.push_back(tape.Grad(v));
  }
  auto evaluate = [&]() {
    Tape tape;
    return ScalarValue(fn(tape));
  };
  double worst = 0.0;
  for (size_t q = 0; q < params.size(); ++q) {
    Tensor& value = params[q]->value;
    for (size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + eps;
      const double up = evaluate();
      value[i] = saved - eps;
      const double down = evaluate();
      value[i] = saved;
      worst = std::max(worst, RelativeError(analytic[q][i], (up - down) / (2 * eps)));
    }
  }
  return worst;
}

}  // namespace kgre
