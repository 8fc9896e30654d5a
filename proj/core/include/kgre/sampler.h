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

#ifndef KGRE_SAMPLER_H_
#define KGRE_SAMPLER_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgre/kg_store.h"

namespace kgre {

using LocalId = uint32_t;

struct NeighborhoodOptions {
  uint32_t hop_cap = 100;  // per node, per direction, per hop
  uint32_t hops = 2;
};

struct SubgraphEdge {
  LocalId source = 0;
  LocalId target = 0;
  RelationId relation = 0;

  auto operator<=>(const SubgraphEdge&) const = default;
};

// Locally indexed document subgraph. Linked nodes come first in ascending
// global order, then unlinked anchors (no global id) in anchor order.
struct Subgraph {
  std::vector<std::optional<EntityId>> nodes;
  std::vector<SubgraphEdge> edges;  // sorted, no duplicates
  std::vector<LocalId> anchors;     // local node of each input anchor
  uint64_t seed = 0;

  size_t node_count() const { return nodes.size(); }
  std::optional<LocalId> Local(EntityId global) const;
  bool IsAnchor(LocalId node) const;

  bool operator==(const Subgraph&) const = default;
};

// Which of `count` candidate edges survive a cap: all of them when
// count <= cap, otherwise a seeded uniform sample without replacement.
// Returned in ascending order.
std::vector<uint32_t> CappedSelection(uint32_t count, uint32_t cap, uint64_t key);

// Seed for the capped selection at one expansion step.
uint64_t ExpansionKey(uint64_t seed, EntityId node, uint32_t hop, Direction direction);

// Upper bound on a neighborhood's size: sum over h <= hops of (2 cap)^h.
size_t NeighborhoodBound(const NeighborhoodOptions& options);

// Breadth-first expansion over base (non-inverse) triples. Each frontier node
// contributes at most hop_cap outgoing and hop_cap incoming edges per hop.
// Returns the node set in ascending order; always contains `entity`.
std::vector<EntityId> TwoHopNeighborhood(const KnowledgeGraph& graph, EntityId entity,
                                         uint64_t seed,
                                         const NeighborhoodOptions& options = {});

// Union of anchor neighborhoods, induced edges (inverse types included when
// present), then a single pruning pass dropping non-anchor nodes that appear
// in exactly one base triple of the induced graph. Unlinked anchors become
// isolated nodes.
Subgraph BuildDocumentSubgraph(const KnowledgeGraph& graph,
                               std::span<const std::optional<EntityId>> anchors,
                               uint64_t seed, const NeighborhoodOptions& options = {});

// Drops every edge between the two endpoints of each pair, both directions,
// any relation. Nodes are untouched.
Subgraph RemoveDirectTriples(const Subgraph& sub,
                             std::span<const std::pair<LocalId, LocalId>> pairs);

// Canonical text form used by golden tests and the `sample` command.
std::string SerializeSubgraph(const Subgraph& sub, const KnowledgeGraph& graph);

}  // namespace kgre

#endif  // KGRE_SAMPLER_H_
