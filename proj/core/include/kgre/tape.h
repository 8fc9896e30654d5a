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

#ifndef KGRE_TAPE_H_
#define KGRE_TAPE_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgre/tensor.h"

namespace kgre {

// Optimizer parameter groups.
enum ParameterGroup : int { kTextGroup = 0, kGraphGroup = 1 };

struct Parameter {
  std::string name;
  Tensor value;
  int group = kTextGroup;
  size_t index = 0;  // position inside its ParameterStore
};

// Owns named parameters at stable addresses.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  // Throws if the name is taken.
  Parameter& Add(std::string name, Tensor init, int group);

  Parameter* Find(std::string_view name);
  const Parameter* Find(std::string_view name) const;

  size_t size() const { return params_.size(); }
  Parameter& operator[](size_t i) { return *params_[i]; }
  const Parameter& operator[](size_t i) const { return *params_[i]; }

  size_t ElementCount() const;

  std::vector<Tensor> Snapshot() const;
  void Restore(const std::vector<Tensor>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, size_t> by_name_;
};

class Tape;

// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, size_t id) : tape_(tape), id_(id) {}

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  size_t id() const { return id_; }
  // Reference into the tape; recording further nodes may invalidate it.
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  Tape* tape_ = nullptr;
  size_t id_ = 0;
};

// Records primitive operations in execution order and replays their
// backward rules in reverse. One tape per example or step; never shared
// across threads.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor& grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Tensor value);
  // Differentiable input; read its gradient with Grad() after Backward().
  Var Leaf(Tensor value);
  // References the parameter's value without copying. Memoized per tape, so
  // every use of one parameter shares a node. The parameter must outlive the
  // tape and must not change while the tape is alive.
  Var Param(const Parameter& param);

  // Appends an operation result. The backward rule is kept only when some
  // input requires a gradient.
  Var Record(Tensor value, std::span<const Var> inputs, BackwardFn backward);
  Var Record(Tensor value, std::initializer_list<Var> inputs,
             BackwardFn backward) {
    return Record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }

  const Tensor& Value(Var v) const;
  bool RequiresGrad(Var v) const;

  // Gradient accumulator of v, zero-initialised on first access.
  Tensor& GradSlot(Var v);

  // Reverse pass from a scalar output. Throws ShapeError for non-scalars.
  void Backward(Var output);

  // Gradient of v after Backward(); zeros if v does not reach the output.
  Tensor Grad(Var v) const;

  // Gradients of every parameter used on this tape, in first-use order.
  std::vector<std::pair<const Parameter*, const Tensor*>> ParameterGradients() const;

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    const Parameter* param = nullptr;
    BackwardFn backward;
  };

  size_t Push(Node node);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, size_t> param_nodes_;
  std::vector<size_t> param_order_;
};

}  // namespace kgre

#endif  // KGRE_TAPE_H_
