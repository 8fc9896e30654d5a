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

#include "kgre/graph_module.h"

#include <map>

#include "kgre/error.h"
#include "kgre/ops.h"
#include "kgre/text_head.h"

namespace kgre {

MessageGraph ToMessageGraph(const Subgraph& sub) {
  MessageGraph g;
  g.nodes = sub.node_count();
  g.source.reserve(sub.edges.size());
  g.target.reserve(sub.edges.size());
  g.type.reserve(sub.edges.size());
  for (const SubgraphEdge& e : sub.edges) {
    g.source.push_back(e.source);
    g.target.push_back(e.target);
    g.type.push_back(e.relation);
  }
  return g;
}

Var BellmanFordPropagate(Tape& /*tape*/, const MessageGraph& graph, uint32_t start,
                         Var boundary, std::span<const NbfLayer> layers) {
  if (start >= graph.nodes) {
    throw Error("start node " + std::to_string(start) + " outside graph of " +
                std::to_string(graph.nodes) + " nodes");
  }
  const size_t d = boundary.value().size();
  const uint32_t start_index[] = {start};
  Var boundary_rows =
      ops::ScatterAddRows(ops::Reshape(boundary, {1, d}), start_index, graph.nodes);
  std::vector<uint32_t> destinations = graph.target;
  for (uint32_t v = 0; v < graph.nodes; ++v) destinations.push_back(v);
  Var state = boundary_rows;
  for (const NbfLayer& layer : layers) {
    Var messages = ops::Mul(ops::GatherRows(state, graph.source),
                            ops::GatherRows(layer.edge_table, graph.type));
    Var all[] = {messages, boundary_rows};
    Var aggregated = ops::PnaAggregate(ops::ConcatRows(all), destinations, graph.nodes);
    state = ops::Relu(ops::Linear(aggregated, layer.weight, layer.bias));
  }
  return state;
}

NbfModel::NbfModel(ParameterStore& store, const NbfConfig& config, Rng& rng,
                   const std::string& prefix)
    : config_(config) {
  const size_t d = config.hidden;
  if (d == 0 || config.layers == 0 || config.relation_types == 0 || config.outputs == 0) {
    throw Error("NBF config needs positive hidden, layers, relation_types and outputs");
  }
  Tensor start(Shape{d});
  for (double& v : start.values()) v = rng.Normal();
  start_ = &store.Add(prefix + ".start", std::move(start), kGraphGroup);
  const size_t tables = config.share_relation_embeddings ? 1 : config.layers;
  for (size_t t = 0; t < tables; ++t) {
    Tensor table(Shape{config.relation_types, d});
    for (double& v : table.values()) v = rng.Normal();
    relation_tables_.push_back(&store.Add(prefix + ".relations." + std::to_string(t),
                                          std::move(table), kGraphGroup));
  }
  for (size_t t = 0; t < config.layers; ++t) {
    weights_.push_back(&store.Add(prefix + ".layer." + std::to_string(t) + ".weight",
                                  InitLinear(d, 4 * d, rng), kGraphGroup));
    biases_.push_back(&store.Add(prefix + ".layer." + std::to_string(t) + ".bias",
                                 Tensor(Shape{d}), kGraphGroup));
  }
  const size_t h = config.head_hidden;
  head_hidden_weight_ = &store.Add(prefix + ".head.hidden.weight", InitLinear(h, d, rng), kGraphGroup);
  head_hidden_bias_ = &store.Add(prefix + ".head.hidden.bias", Tensor(Shape{h}), kGraphGroup);
  head_out_weight_ = &store.Add(prefix + ".head.out.weight", InitLinear(config.outputs, h, rng), kGraphGroup);
  head_out_bias_ = &store.Add(prefix + ".head.out.bias", Tensor(Shape{config.outputs}), kGraphGroup);
}

Var NbfModel::Forward(Tape& tape, const Subgraph& sub, LocalId start) const {
  return Forward(tape, ToMessageGraph(sub), start, tape.Param(*start_));
}

Var NbfModel::Forward(Tape& tape, const MessageGraph& graph, LocalId start,
                      Var start_vector) const {
  for (uint32_t t : graph.type) {
    if (t >= config_.relation_types) {
      throw Error("relation type " + std::to_string(t) + " has no embedding (" +
                  std::to_string(config_.relation_types) + " types)");
    }
  }
  std::vector<NbfLayer> layers;
  for (size_t t = 0; t < config_.layers; ++t) {
    const Parameter* table = relation_tables_[config_.share_relation_embeddings ? 0 : t];
    layers.push_back({tape.Param(*weights_[t]), tape.Param(*biases_[t]), tape.Param(*table)});
  }
  return BellmanFordPropagate(tape, graph, start, start_vector, layers);
}

Var NbfModel::RelationLogits(Tape& tape, Var node_state) const {
  Var hidden = ops::Relu(ops::Linear(node_state, tape.Param(*head_hidden_weight_),
                                     tape.Param(*head_hidden_bias_)));
  return ops::Linear(hidden, tape.Param(*head_out_weight_), tape.Param(*head_out_bias_));
}

std::vector<Var> NbfModel::ScoreAllPairs(Tape& tape, const Subgraph& sub,
                                         std::span<const PairQuery> pairs,
                                         size_t* forward_passes) const {
  std::map<LocalId, Var> states;
  std::vector<Var> out;
  out.reserve(pairs.size());
  size_t passes = 0;
  for (const PairQuery& p : pairs) {
    auto it = states.find(p.subject);
    if (it == states.end()) {
      it = states.emplace(p.subject, Forward(tape, sub, p.subject)).first;
      ++passes;
    }
    out.push_back(RelationLogits(tape, ops::SelectRow(it->second, p.object)));
  }
  if (forward_passes) *forward_passes = passes;
  return out;
}

std::vector<Parameter*> NbfModel::Parameters() const {
  std::vector<Parameter*> out{start_};
  out.insert(out.end(), relation_tables_.begin(), relation_tables_.end());
  for (size_t t = 0; t < weights_.size(); ++t) {
    out.push_back(weights_[t]);
    out.push_back(biases_[t]);
  }
  out.insert(out.end(), {head_hidden_weight_, head_hidden_bias_, head_out_weight_,
                         head_out_bias_});
  return out;
}

}  // namespace kgre
