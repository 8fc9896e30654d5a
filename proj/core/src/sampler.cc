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

#include "kgre/sampler.h"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "kgre/error.h"
#include "kgre/rng.h"

namespace kgre {

std::optional<LocalId> Subgraph::Local(EntityId global) const {
  // Linked nodes form a sorted prefix.
  size_t lo = 0, hi = nodes.size();
  while (lo < hi && !nodes[hi - 1].has_value()) --hi;
  auto begin = nodes.begin(), end = nodes.begin() + hi;
  auto it = std::lower_bound(begin, end, global,
                             [](const std::optional<EntityId>& n, EntityId g) {
                               return *n < g;
                             });
  if (it == end || **it != global) return std::nullopt;
  return static_cast<LocalId>(it - nodes.begin());
}

bool Subgraph::IsAnchor(LocalId node) const {
  return std::find(anchors.begin(), anchors.end(), node) != anchors.end();
}

std::vector<uint32_t> CappedSelection(uint32_t count, uint32_t cap, uint64_t key) {
  std::vector<uint32_t> out;
  if (count <= cap) {
    out.resize(count);
    for (uint32_t i = 0; i < count; ++i) out[i] = i;
    return out;
  }
  Rng rng(key);
  out = rng.SampleWithoutReplacement(count, cap);
  std::sort(out.begin(), out.end());
  return out;
}

uint64_t ExpansionKey(uint64_t seed, EntityId node, uint32_t hop, Direction direction) {
  return DeriveSeed(seed, {node, hop, static_cast<uint64_t>(direction)});
}

size_t NeighborhoodBound(const NeighborhoodOptions& options) {
  size_t total = 0, layer = 1;
  for (uint32_t h = 0; h <= options.hops; ++h) {
    total += layer;
    layer *= 2 * static_cast<size_t>(options.hop_cap);
  }
  return total;
}

namespace {

// Base-triple neighbors of `node` in one direction, after the cap.
void ExpandNode(const KnowledgeGraph& graph, EntityId node, uint32_t hop,
                Direction direction, uint64_t seed, uint32_t cap,
                std::vector<EntityId>& out) {
  auto incident = direction == Direction::kOut ? graph.OutEdges(node) : graph.InEdges(node);
  std::vector<uint32_t> base;
  base.reserve(incident.size());
  for (uint32_t i : incident) {
    if (!graph.IsInverse(graph.triples()[i].relation)) base.push_back(i);
  }
  const auto keep = CappedSelection(static_cast<uint32_t>(base.size()), cap,
                                    ExpansionKey(seed, node, hop, direction));
  for (uint32_t k : keep) {
    const Triple& t = graph.triples()[base[k]];
    out.push_back(direction == Direction::kOut ? t.object : t.subject);
  }
}

}  // namespace

std::vector<EntityId> TwoHopNeighborhood(const KnowledgeGraph& graph, EntityId entity,
                                         uint64_t seed, const NeighborhoodOptions& options) {
  if (entity >= graph.entity_count()) {
    throw Error("entity index " + std::to_string(entity) + " out of range");
  }
  if (options.hop_cap == 0) throw Error("hop_cap must be at least 1");
  std::unordered_set<EntityId> visited{entity};
  std::vector<EntityId> frontier{entity};
  std::vector<EntityId> result{entity};
  for (uint32_t hop = 0; hop < options.hops && !frontier.empty(); ++hop) {
    std::sort(frontier.begin(), frontier.end());
    std::vector<EntityId> next;
    for (EntityId u : frontier) {
      std::vector<EntityId> found;
      ExpandNode(graph, u, hop, Direction::kOut, seed, options.hop_cap, found);
      ExpandNode(graph, u, hop, Direction::kIn, seed, options.hop_cap, found);
      for (EntityId v : found) {
        if (visited.insert(v).second) {
          next.push_back(v);
          result.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(result.begin(), result.end());
  return result;
}

Subgraph BuildDocumentSubgraph(const KnowledgeGraph& graph,
                               std::span<const std::optional<EntityId>> anchors,
                               uint64_t seed, const NeighborhoodOptions& options) {
  if (anchors.empty()) throw Error("document subgraph needs at least one anchor");
  std::vector<EntityId> members;
  std::unordered_set<EntityId> anchor_set;
  for (const auto& a : anchors) {
    if (!a) continue;
    anchor_set.insert(*a);
    auto hood = TwoHopNeighborhood(graph, *a, seed, options);
    members.insert(members.end(), hood.begin(), hood.end());
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  auto index_of = [&](EntityId g) -> std::optional<uint32_t> {
    auto it = std::lower_bound(members.begin(), members.end(), g);
    if (it == members.end() || *it != g) return std::nullopt;
    return static_cast<uint32_t>(it - members.begin());
  };

  // Degree over base triples of the induced graph, before pruning.
  std::vector<uint32_t> degree(members.size(), 0);
  for (uint32_t u = 0; u < members.size(); ++u) {
    for (uint32_t i : graph.OutEdges(members[u])) {
      const Triple& t = graph.triples()[i];
      if (graph.IsInverse(t.relation)) continue;
      auto v = index_of(t.object);
      if (!v) continue;
      ++degree[u];
      if (*v != u) ++degree[*v];
    }
  }
  std::vector<EntityId> kept;
  for (uint32_t u = 0; u < members.size(); ++u) {
    if (degree[u] == 1 && anchor_set.count(members[u]) == 0) continue;
    kept.push_back(members[u]);
  }

  Subgraph sub;
  sub.seed = seed;
  for (EntityId g : kept) sub.nodes.emplace_back(g);
  for (const auto& a : anchors) {
    if (a) {
      sub.anchors.push_back(*sub.Local(*a));
    } else {
      sub.anchors.push_back(static_cast<LocalId>(sub.nodes.size()));
      sub.nodes.emplace_back(std::nullopt);
    }
  }
  for (LocalId u = 0; u < kept.size(); ++u) {
    for (uint32_t i : graph.OutEdges(kept[u])) {
      const Triple& t = graph.triples()[i];
      auto it = std::lower_bound(kept.begin(), kept.end(), t.object);
      if (it == kept.end() || *it != t.object) continue;
      sub.edges.push_back({u, static_cast<LocalId>(it - kept.begin()), t.relation});
    }
  }
  std::sort(sub.edges.begin(), sub.edges.end());
  return sub;
}

Subgraph RemoveDirectTriples(const Subgraph& sub,
                             std::span<const std::pair<LocalId, LocalId>> pairs) {
  for (const auto& [s, o] : pairs) {
    if (s >= sub.node_count() || o >= sub.node_count()) {
      throw Error("RemoveDirectTriples: local index out of range");
    }
  }
  Subgraph out = sub;
  std::erase_if(out.edges, [&](const SubgraphEdge& e) {
    for (const auto& [s, o] : pairs) {
      if ((e.source == s && e.target == o) || (e.source == o && e.target == s)) return true;
    }
    return false;
  });
  return out;
}

std::string SerializeSubgraph(const Subgraph& sub, const KnowledgeGraph& graph) {
  std::ostringstream out;
  out << "# kgre subgraph v1\n";
  out << "seed\t" << sub.seed << "\n";
  out << "nodes\t" << sub.node_count() << "\n";
  for (LocalId u = 0; u < sub.node_count(); ++u) {
    out << u << '\t';
    if (sub.nodes[u]) {
      out << *sub.nodes[u] << '\t' << graph.entities().Name(*sub.nodes[u]);
    } else {
      out << "-\t-";
    }
    out << '\t' << (sub.IsAnchor(u) ? 1 : 0) << '\n';
  }
  out << "edges\t" << sub.edges.size() << "\n";
  for (const SubgraphEdge& e : sub.edges) {
    out << e.source << '\t' << e.target << '\t' << e.relation << '\n';
  }
  return out.str();
}

}  // namespace kgre
