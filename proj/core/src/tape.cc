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

#include "kgre/tape.h"

#include "kgre/error.h"

namespace kgre {

Parameter& ParameterStore::Add(std::string name, Tensor init, int group) {
  if (by_name_.count(name) > 0) throw Error("duplicate parameter name: " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = std::move(init);
  p->group = group;
  p->index = params_.size();
  by_name_.emplace(std::move(name), params_.size());
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter* ParameterStore::Find(std::string_view name) {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : params_[it->second].get();
}

const Parameter* ParameterStore::Find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : params_[it->second].get();
}

size_t ParameterStore::ElementCount() const {
  size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

std::vector<Tensor> ParameterStore::Snapshot() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterStore::Restore(const std::vector<Tensor>& values) {
  if (values.size() != params_.size()) throw Error("snapshot size mismatch");
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i].shape() != params_[i]->value.shape()) {
      throw ShapeError("snapshot shape mismatch for " + params_[i]->name);
    }
    params_[i]->value = values[i];
  }
}

const Tensor& Var::value() const { return tape_->Value(*this); }

size_t Tape::Push(Node node) {
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

Var Tape::Constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  return Var(this, Push(std::move(n)));
}

Var Tape::Leaf(Tensor value) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = true;
  return Var(this, Push(std::move(n)));
}

Var Tape::Param(const Parameter& param) {
  auto it = param_nodes_.find(&param);
  if (it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.external = &param.value;
  n.requires_grad = true;
  n.param = &param;
  size_t id = Push(std::move(n));
  param_nodes_.emplace(&param, id);
  param_order_.push_back(id);
  return Var(this, id);
}

Var Tape::Record(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
  Node n;
  n.owned = std::move(value);
  for (const Var& in : inputs) {
    if (in.valid() && &in.tape() != this) {
      throw Error("operation mixes values from different tapes");
    }
    if (in.valid() && nodes_[in.id()].requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return Var(this, Push(std::move(n)));
}

const Tensor& Tape::Value(Var v) const {
  const Node& n = nodes_.at(v.id());
  return n.external ? *n.external : n.owned;
}

bool Tape::RequiresGrad(Var v) const {
  return v.valid() && nodes_.at(v.id()).requires_grad;
}

Tensor& Tape::GradSlot(Var v) {
  Node& n = nodes_.at(v.id());
  if (!n.has_grad) {
    n.grad = Tensor(Value(v).shape());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::Backward(Var output) {
  if (!output.valid() || &output.tape() != this) {
    throw Error("Backward: output is not recorded on this tape");
  }
  if (Value(output).size() != 1) {
    throw ShapeError("Backward needs a scalar output, got " +
                     ShapeToString(Value(output).shape()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  GradSlot(output).Fill(1.0);
  for (size_t i = output.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

Tensor Tape::Grad(Var v) const {
  const Node& n = nodes_.at(v.id());
  if (n.has_grad) return n.grad;
  return Tensor(Value(v).shape());
}

std::vector<std::pair<const Parameter*, const Tensor*>> Tape::ParameterGradients()
    const {
  std::vector<std::pair<const Parameter*, const Tensor*>> out;
  for (size_t id : param_order_) {
    const Node& n = nodes_[id];
    if (n.has_grad) out.emplace_back(n.param, &n.grad);
  }
  return out;
}

}  // namespace kgre
