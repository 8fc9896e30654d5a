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

#ifndef KGRE_GRAPH_MODULE_H_
#define KGRE_GRAPH_MODULE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgre/rng.h"
#include "kgre/sampler.h"
#include "kgre/tape.h"

namespace kgre {

// Typed directed edges over a dense node range; the input of one
// Bellman-Ford style message-passing run.
struct MessageGraph {
  size_t nodes = 0;
  std::vector<uint32_t> source;
  std::vector<uint32_t> target;
  std::vector<uint32_t> type;
};

MessageGraph ToMessageGraph(const Subgraph& sub);

struct NbfLayer {
  Var weight;      // [d x 4d]
  Var bias;        // [d]
  Var edge_table;  // [types x d], indexed by edge type
};

// Generalized Bellman-Ford iteration. The start node's boundary vector is
// `boundary`, every other node's is zero. Each layer sends
// state[u] * edge_table[type] along every edge, adds each node's boundary
// vector to its own message set, aggregates with PNA and applies
// relu(W agg + b). Returns the final states [nodes x d].
Var BellmanFordPropagate(Tape& tape, const MessageGraph& graph, uint32_t start,
                         Var boundary, std::span<const NbfLayer> layers);

struct NbfConfig {
  size_t hidden = 32;       // d_g
  size_t layers = 4;        // T
  size_t head_hidden = 32;
  size_t relation_types = 0;  // |R_G'| including inverses and predicted types
  size_t outputs = 0;         // |R| (+1 for the threshold slot)
  bool share_relation_embeddings = false;
};

// Start-node conditioned NBF with a relation head that scores every output
// relation for each node, so no query relation is needed.
class NbfModel {
 public:
  NbfModel(ParameterStore& store, const NbfConfig& config, Rng& rng,
           const std::string& prefix = "nbf");

  const NbfConfig& config() const { return config_; }

  Var Forward(Tape& tape, const Subgraph& sub, LocalId start) const;
  // Forward with an explicit start vector in place of the learned one.
  Var Forward(Tape& tape, const MessageGraph& graph, LocalId start, Var start_vector) const;

  // W_4 relu(W_3 g + b_3) + b_4.
  Var RelationLogits(Tape& tape, Var node_state) const;

  struct PairQuery {
    LocalId subject = 0;
    LocalId object = 0;
  };
  // One forward pass per distinct subject; logits in query order.
  std::vector<Var> ScoreAllPairs(Tape& tape, const Subgraph& sub,
                                 std::span<const PairQuery> pairs,
                                 size_t* forward_passes = nullptr) const;

  std::vector<Parameter*> Parameters() const;
  Parameter& start_vector() const { return *start_; }

 private:
  NbfConfig config_;
  Parameter* start_;
  std::vector<Parameter*> relation_tables_;
  std::vector<Parameter*> weights_;
  std::vector<Parameter*> biases_;
  Parameter* head_hidden_weight_;
  Parameter* head_hidden_bias_;
  Parameter* head_out_weight_;
  Parameter* head_out_bias_;
};

}  // namespace kgre

#endif  // KGRE_GRAPH_MODULE_H_
