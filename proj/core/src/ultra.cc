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

#include "kgre/ultra.h"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "kgre/error.h"
#include "kgre/ops.h"
#include "kgre/text_head.h"

namespace kgre {

const char* InteractionName(uint32_t type) {
  static constexpr const char* kNames[] = {"hh", "ht", "th", "tt"};
  if (type >= kInteractionTypes) throw Error("invalid interaction type");
  return kNames[type];
}

RelationGraph BuildRelationGraph(const KnowledgeGraph& graph) {
  std::vector<uint32_t> all(graph.triples().size());
  for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  return BuildRelationGraph(graph, all);
}

RelationGraph BuildRelationGraph(const KnowledgeGraph& graph,
                                 std::span<const uint32_t> triples) {
  // (entity, relation, position, triple); position 0 = head, 1 = tail.
  std::vector<std::tuple<EntityId, RelationId, uint32_t, uint32_t>> incidence;
  incidence.reserve(2 * triples.size());
  for (uint32_t index : triples) {
    const Triple& t = graph.triples()[index];
    incidence.emplace_back(t.subject, t.relation, 0, index);
    incidence.emplace_back(t.object, t.relation, 1, index);
  }
  std::sort(incidence.begin(), incidence.end());

  struct Key {
    RelationId relation;
    uint32_t position;
    uint32_t count;
    uint32_t first_triple;
  };
  std::vector<RelationEdge> edges;
  std::vector<Key> keys;
  for (size_t i = 0; i < incidence.size();) {
    const EntityId entity = std::get<0>(incidence[i]);
    keys.clear();
    size_t j = i;
    for (; j < incidence.size() && std::get<0>(incidence[j]) == entity; ++j) {
      const auto& [e, rel, pos, tri] = incidence[j];
      if (!keys.empty() && keys.back().relation == rel && keys.back().position == pos) {
        // The same triple can only repeat under one key via a duplicate index.
        if (keys.back().first_triple != tri) ++keys.back().count;
      } else {
        keys.push_back({rel, pos, 1, tri});
      }
    }
    for (const Key& a : keys) {
      for (const Key& b : keys) {
        bool distinct;
        if (&a == &b) {
          distinct = a.count >= 2;
        } else {
          distinct = !(a.count == 1 && b.count == 1 && a.first_triple == b.first_triple);
        }
        if (distinct) edges.push_back({a.relation, b.relation, 2 * a.position + b.position});
      }
    }
    i = j;
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  RelationGraph rg;
  rg.relations = graph.relation_count();
  rg.support.assign(edges.size(), 0);
  rg.edges = std::move(edges);
  return rg;
}

std::vector<uint32_t> InducedTriples(const KnowledgeGraph& graph,
                                     std::span<const EntityId> nodes) {
  std::vector<uint32_t> out;
  for (EntityId v : nodes) {
    for (uint32_t index : graph.OutEdges(v)) {
      if (std::binary_search(nodes.begin(), nodes.end(), graph.triples()[index].object)) {
        out.push_back(index);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool ApplySupportThreshold(uint32_t support, uint32_t neighborhoods, double threshold) {
  return support > 0 && static_cast<double>(support) >= threshold * neighborhoods;
}

RelationGraph FilterSupportGraph(const KnowledgeGraph& graph,
                                 std::span<const RelationId> relations, uint64_t seed,
                                 const SupportOptions& options) {
  std::unordered_map<EntityId, std::vector<RelationEdge>> cache;
  auto neighborhood_edges = [&](EntityId entity) -> const std::vector<RelationEdge>& {
    auto it = cache.find(entity);
    if (it != cache.end()) return it->second;
    std::vector<EntityId> nodes =
        TwoHopNeighborhood(graph, entity, DeriveSeed(seed, {entity}), options.neighborhood);
    std::vector<uint32_t> triples = InducedTriples(graph, nodes);
    return cache.emplace(entity, BuildRelationGraph(graph, triples).edges).first->second;
  };

  std::map<RelationEdge, uint32_t> support;
  uint32_t neighborhoods = 0;
  for (RelationId r : relations) {
    if (r >= graph.relation_count()) {
      throw Error("relation id " + std::to_string(r) + " not in graph");
    }
    std::span<const uint32_t> available = graph.RelationEdges(r);
    if (available.empty()) {
      throw Error("relation '" + graph.relations().Name(r) + "' has no triples");
    }
    const uint32_t n = static_cast<uint32_t>(available.size());
    Rng rng(DeriveSeed(seed, {0x737570706f7274ULL, r}));
    for (uint32_t pick :
         rng.SampleWithoutReplacement(n, std::min(options.samples_per_relation, n))) {
      const Triple& t = graph.triples()[available[pick]];
      for (EntityId e : {t.subject, t.object}) {
        for (const RelationEdge& edge : neighborhood_edges(e)) ++support[edge];
        ++neighborhoods;
      }
    }
  }

  RelationGraph rg;
  rg.relations = graph.relation_count();
  rg.neighborhoods = neighborhoods;
  for (const auto& [edge, count] : support) {
    if (ApplySupportThreshold(count, neighborhoods, options.keep_threshold)) {
      rg.edges.push_back(edge);
      rg.support.push_back(count);
    }
  }
  return rg;
}

std::string SerializeRelationGraph(const RelationGraph& rg, const KnowledgeGraph* graph) {
  std::ostringstream out;
  out << "# kgre relation graph v1\n";
  out << "relations " << rg.relations << "\n";
  out << "neighborhoods " << rg.neighborhoods << "\n";
  out << "edges " << rg.edges.size() << "\n";
  auto name = [&](RelationId r) {
    return graph && r < graph->relation_count() ? graph->relations().Name(r)
                                                : std::to_string(r);
  };
  for (size_t i = 0; i < rg.edges.size(); ++i) {
    const RelationEdge& e = rg.edges[i];
    out << name(e.from) << '\t' << name(e.to) << '\t' << InteractionName(e.type) << '\t'
        << rg.support[i] << '\n';
  }
  return out.str();
}

MessageGraph ToMessageGraph(const RelationGraph& rg) {
  MessageGraph g;
  g.nodes = rg.relations;
  for (const RelationEdge& e : rg.edges) {
    g.source.push_back(e.from);
    g.target.push_back(e.to);
    g.type.push_back(e.type);
  }
  return g;
}

UltraModel::UltraModel(ParameterStore& store, const UltraConfig& config, Rng& rng,
                       const std::string& prefix)
    : config_(config) {
  const size_t d = config.hidden;
  if (d == 0 || config.layers == 0 || config.head_hidden == 0) {
    throw Error("ULTRA config needs positive hidden, layers and head_hidden");
  }
  relation_start_ = &store.Add(prefix + ".relation.start", Tensor(Shape{d}, 1.0), kGraphGroup);
  for (size_t t = 0; t < config.layers; ++t) {
    const std::string layer = std::to_string(t);
    Tensor table(Shape{kInteractionTypes, d});
    for (double& v : table.values()) v = rng.Normal();
    interaction_tables_.push_back(
        &store.Add(prefix + ".relation.interactions." + layer, std::move(table), kGraphGroup));
    relation_weights_.push_back(&store.Add(prefix + ".relation.layer." + layer + ".weight",
                                           InitLinear(d, 4 * d, rng), kGraphGroup));
    relation_biases_.push_back(&store.Add(prefix + ".relation.layer." + layer + ".bias",
                                          Tensor(Shape{d}), kGraphGroup));
  }
  for (size_t t = 0; t < config.layers; ++t) {
    const std::string layer = std::to_string(t);
    entity_weights_.push_back(&store.Add(prefix + ".entity.layer." + layer + ".weight",
                                         InitLinear(d, 4 * d, rng), kGraphGroup));
    entity_biases_.push_back(&store.Add(prefix + ".entity.layer." + layer + ".bias",
                                        Tensor(Shape{d}), kGraphGroup));
  }
  const size_t h = config.head_hidden;
  w5_ = &store.Add(prefix + ".score.hidden.weight", InitLinear(h, d, rng), kGraphGroup);
  b5_ = &store.Add(prefix + ".score.hidden.bias", Tensor(Shape{h}), kGraphGroup);
  w6_ = &store.Add(prefix + ".score.out.weight", InitLinear(1, h, rng), kGraphGroup);
  b6_ = &store.Add(prefix + ".score.out.bias", Tensor(Shape{1}), kGraphGroup);
}

Var UltraModel::RelationRepresentations(Tape& tape, const RelationGraph& rg,
                                        RelationId query) const {
  return RelationRepresentations(tape, ToMessageGraph(rg), query);
}

Var UltraModel::RelationRepresentations(Tape& tape, const MessageGraph& rg,
                                        RelationId query) const {
  if (query >= rg.nodes) {
    throw Error("query relation " + std::to_string(query) + " absent from relation graph");
  }
  std::vector<NbfLayer> layers;
  for (size_t t = 0; t < config_.layers; ++t) {
    layers.push_back({tape.Param(*relation_weights_[t]), tape.Param(*relation_biases_[t]),
                      tape.Param(*interaction_tables_[t])});
  }
  return BellmanFordPropagate(tape, rg, query, tape.Param(*relation_start_), layers);
}

Var UltraModel::EntityStates(Tape& tape, const MessageGraph& sub, LocalId subject,
                             Var relation_states, RelationId query) const {
  const size_t relations = relation_states.value().rows();
  for (uint32_t t : sub.type) {
    if (t >= relations) {
      throw Error("subgraph relation " + std::to_string(t) + " missing from relation graph");
    }
  }
  Var boundary = ops::SelectRow(relation_states, query);
  std::vector<NbfLayer> layers;
  for (size_t t = 0; t < config_.layers; ++t) {
    layers.push_back({tape.Param(*entity_weights_[t]), tape.Param(*entity_biases_[t]),
                      relation_states});
  }
  return BellmanFordPropagate(tape, sub, subject, boundary, layers);
}

Var UltraModel::Score(Tape& tape, Var object_state) const {
  Var hidden = ops::Relu(ops::Linear(object_state, tape.Param(*w5_), tape.Param(*b5_)));
  return ops::Linear(hidden, tape.Param(*w6_), tape.Param(*b6_));
}

Var UltraModel::Logits(Tape& tape, const Subgraph& sub, LocalId subject, LocalId object,
                       std::span<const RelationId> candidates, const RelationGraph& rg) const {
  MessageGraph relation_graph = ToMessageGraph(rg);
  std::vector<Var> states;
  for (RelationId r : candidates) {
    states.push_back(RelationRepresentations(tape, relation_graph, r));
  }
  return Logits(tape, sub, subject, object, candidates, states);
}

Var UltraModel::Logits(Tape& tape, const Subgraph& sub, LocalId subject, LocalId object,
                       std::span<const RelationId> candidates,
                       std::span<const Var> relation_states) const {
  if (candidates.empty()) throw Error("ULTRA needs at least one candidate relation");
  if (relation_states.size() != candidates.size()) {
    throw Error("one relation representation per candidate expected");
  }
  const std::pair<LocalId, LocalId> pair[] = {{subject, object}};
  MessageGraph graph = ToMessageGraph(RemoveDirectTriples(sub, pair));
  std::vector<Var> scores;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] >= relation_states[i].value().rows()) {
      throw Error("candidate relation " + std::to_string(candidates[i]) +
                  " missing from relation graph");
    }
    Var states = EntityStates(tape, graph, subject, relation_states[i], candidates[i]);
    scores.push_back(Score(tape, ops::SelectRow(states, object)));
  }
  return ops::ConcatCols(scores);
}

std::vector<Parameter*> UltraModel::Parameters() const {
  std::vector<Parameter*> out{relation_start_};
  for (size_t t = 0; t < config_.layers; ++t) {
    out.push_back(interaction_tables_[t]);
    out.push_back(relation_weights_[t]);
    out.push_back(relation_biases_[t]);
  }
  for (size_t t = 0; t < config_.layers; ++t) {
    out.push_back(entity_weights_[t]);
    out.push_back(entity_biases_[t]);
  }
  out.insert(out.end(), {w5_, b5_, w6_, b6_});
  return out;
}

}  // namespace kgre
