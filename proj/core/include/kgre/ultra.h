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

#ifndef KGRE_ULTRA_H_
#define KGRE_ULTRA_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgre/graph_module.h"
#include "kgre/kg_store.h"
#include "kgre/rng.h"
#include "kgre/sampler.h"
#include "kgre/tape.h"

namespace kgre {

// Which endpoints two triples share: position in the first triple, then in
// the second.
enum Interaction : uint32_t {
  kHeadHead = 0,
  kHeadTail = 1,
  kTailHead = 2,
  kTailTail = 3,
};
inline constexpr size_t kInteractionTypes = 4;

const char* InteractionName(uint32_t type);

struct RelationEdge {
  RelationId from = 0;
  RelationId to = 0;
  uint32_t type = kHeadHead;

  auto operator<=>(const RelationEdge&) const = default;
};

// Meta-graph over relation types. Edges are sorted and unique; support[i]
// counts the sampled neighborhoods containing edges[i] (zero when the graph
// was built without sampling).
struct RelationGraph {
  size_t relations = 0;
  std::vector<RelationEdge> edges;
  std::vector<uint32_t> support;
  uint32_t neighborhoods = 0;

  bool operator==(const RelationGraph&) const = default;
};

// Edge r_a -> r_b for every ordered pair of distinct triples sharing an
// entity, typed by the shared entity's positions.
RelationGraph BuildRelationGraph(const KnowledgeGraph& graph);
// Same, restricted to a subset of triples (indices into graph.triples()).
RelationGraph BuildRelationGraph(const KnowledgeGraph& graph,
                                 std::span<const uint32_t> triples);

// Triple indices with both endpoints in `nodes` (sorted ascending).
std::vector<uint32_t> InducedTriples(const KnowledgeGraph& graph,
                                     std::span<const EntityId> nodes);

bool ApplySupportThreshold(uint32_t support, uint32_t neighborhoods, double threshold);

struct SupportOptions {
  uint32_t samples_per_relation = 1000;
  double keep_threshold = 0.10;
  NeighborhoodOptions neighborhood;
};

// Samples up to samples_per_relation triples of each listed relation, takes
// the two-hop neighborhoods of their subjects and objects, and keeps the
// relation-graph edges present in at least keep_threshold of all those
// neighborhoods. Throws when a listed relation has no triples.
RelationGraph FilterSupportGraph(const KnowledgeGraph& graph,
                                 std::span<const RelationId> relations, uint64_t seed,
                                 const SupportOptions& options = {});

// Canonical text form: header, counts, then "from to type support" lines.
std::string SerializeRelationGraph(const RelationGraph& rg, const KnowledgeGraph* graph = nullptr);

MessageGraph ToMessageGraph(const RelationGraph& rg);

struct UltraConfig {
  size_t hidden = 32;
  size_t layers = 4;
  size_t head_hidden = 32;
};

// Two-encoder zero-shot scorer: relation representations from an NBF pass
// over the relation graph, then an entity-level pass that uses them as edge
// embeddings.
class UltraModel {
 public:
  UltraModel(ParameterStore& store, const UltraConfig& config, Rng& rng,
             const std::string& prefix = "ultra");

  const UltraConfig& config() const { return config_; }

  // h_r for every relation node, conditioned on `query`. [relations x d]
  Var RelationRepresentations(Tape& tape, const RelationGraph& rg, RelationId query) const;
  Var RelationRepresentations(Tape& tape, const MessageGraph& rg, RelationId query) const;

  // Entity states [nodes x d] from `subject` with boundary h_query.
  Var EntityStates(Tape& tape, const MessageGraph& sub, LocalId subject,
                   Var relation_states, RelationId query) const;

  // W_6 relu(W_5 h + b_5) + b_6, shape [1].
  Var Score(Tape& tape, Var object_state) const;

  // One score per candidate; direct triples between subject and object are
  // dropped from `sub` first.
  Var Logits(Tape& tape, const Subgraph& sub, LocalId subject, LocalId object,
             std::span<const RelationId> candidates, const RelationGraph& rg) const;
  // As above with relation representations computed by the caller, one per
  // candidate (reused across examples at evaluation time).
  Var Logits(Tape& tape, const Subgraph& sub, LocalId subject, LocalId object,
             std::span<const RelationId> candidates,
             std::span<const Var> relation_states) const;

  std::vector<Parameter*> Parameters() const;

 private:
  UltraConfig config_;
  Parameter* relation_start_;
  std::vector<Parameter*> interaction_tables_;
  std::vector<Parameter*> relation_weights_;
  std::vector<Parameter*> relation_biases_;
  std::vector<Parameter*> entity_weights_;
  std::vector<Parameter*> entity_biases_;
  Parameter* w5_;
  Parameter* b5_;
  Parameter* w6_;
  Parameter* b6_;
};

}  // namespace kgre

#endif  // KGRE_ULTRA_H_
