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

// Brute-force reference implementations shared by the unit tests and the
// acceptance suite. They scan the raw triple list instead of the adjacency
// indexes and share no code with the library beyond Rng and DeriveSeed.

#ifndef KGRE_TESTS_SUPPORT_ORACLES_H_
#define KGRE_TESTS_SUPPORT_ORACLES_H_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "kgre/kg_store.h"
#include "kgre/rng.h"
#include "kgre/sampler.h"
#include "kgre/tensor.h"
#include "kgre/ultra.h"

namespace kgre::oracle {

struct Expansion {
  EntityId node = 0;
  uint32_t hop = 0;
  int direction = 0;  // 0 out, 1 in
  uint32_t available = 0;
  uint32_t taken = 0;
};

struct Neighborhood {
  std::vector<EntityId> nodes;  // ascending
  std::vector<Expansion> expansions;
};

inline bool IsBase(const KnowledgeGraph& g, RelationId r) {
  return !g.has_inverses() || r < g.relation_count() / 2;
}

inline Neighborhood BfsNeighborhood(const KnowledgeGraph& g, EntityId start, uint64_t seed,
                                    uint32_t cap, uint32_t hops) {
  Neighborhood out;
  std::set<EntityId> seen{start};
  std::set<EntityId> frontier{start};
  const auto triples = g.triples();
  for (uint32_t hop = 0; hop < hops && !frontier.empty(); ++hop) {
    std::set<EntityId> next;
    for (EntityId u : frontier) {
      for (int dir = 0; dir < 2; ++dir) {
        std::vector<EntityId> ends;
        for (const Triple& t : triples) {
          if (!IsBase(g, t.relation)) continue;
          if (dir == 0 && t.subject == u) ends.push_back(t.object);
          if (dir == 1 && t.object == u) ends.push_back(t.subject);
        }
        std::vector<uint32_t> keep;
        const auto n = static_cast<uint32_t>(ends.size());
        if (n <= cap) {
          for (uint32_t i = 0; i < n; ++i) keep.push_back(i);
        } else {
          Rng rng(DeriveSeed(seed, {u, hop, static_cast<uint64_t>(dir)}));
          keep = rng.SampleWithoutReplacement(n, cap);
        }
        out.expansions.push_back({u, hop, dir, n, static_cast<uint32_t>(keep.size())});
        for (uint32_t k : keep) {
          if (seen.insert(ends[k]).second) next.insert(ends[k]);
        }
      }
    }
    frontier = std::move(next);
  }
  out.nodes.assign(seen.begin(), seen.end());
  return out;
}

// Base-triple degree of every member inside the induced graph. A self-loop
// counts once.
inline std::map<EntityId, uint32_t> InducedDegree(const KnowledgeGraph& g,
                                                  const std::set<EntityId>& members) {
  std::map<EntityId, uint32_t> degree;
  for (EntityId e : members) degree[e] = 0;
  for (const Triple& t : g.triples()) {
    if (!IsBase(g, t.relation)) continue;
    if (!members.count(t.subject) || !members.count(t.object)) continue;
    ++degree[t.subject];
    if (t.object != t.subject) ++degree[t.object];
  }
  return degree;
}

inline Subgraph DocumentSubgraph(const KnowledgeGraph& g,
                                 std::span<const std::optional<EntityId>> anchors,
                                 uint64_t seed, uint32_t cap, uint32_t hops) {
  std::set<EntityId> members, anchor_set;
  for (const auto& a : anchors) {
    if (!a) continue;
    anchor_set.insert(*a);
    for (EntityId e : BfsNeighborhood(g, *a, seed, cap, hops).nodes) members.insert(e);
  }
  const auto degree = InducedDegree(g, members);
  std::vector<EntityId> kept;
  for (EntityId e : members) {
    if (degree.at(e) == 1 && !anchor_set.count(e)) continue;
    kept.push_back(e);
  }
  Subgraph sub;
  sub.seed = seed;
  for (EntityId e : kept) sub.nodes.emplace_back(e);
  auto local = [&](EntityId e) -> std::optional<LocalId> {
    auto it = std::find(kept.begin(), kept.end(), e);
    if (it == kept.end()) return std::nullopt;
    return static_cast<LocalId>(it - kept.begin());
  };
  for (const auto& a : anchors) {
    if (a) {
      sub.anchors.push_back(*local(*a));
    } else {
      sub.anchors.push_back(static_cast<LocalId>(sub.nodes.size()));
      sub.nodes.emplace_back(std::nullopt);
    }
  }
  std::set<SubgraphEdge> edges;
  for (const Triple& t : g.triples()) {
    auto u = local(t.subject), v = local(t.object);
    if (u && v) edges.insert({*u, *v, t.relation});
  }
  sub.edges.assign(edges.begin(), edges.end());
  return sub;
}

// Every ordered pair of distinct triples, every coinciding endpoint.
inline std::set<RelationEdge> PairwiseRelationEdges(const KnowledgeGraph& g,
                                                    std::span<const uint32_t> subset) {
  std::set<RelationEdge> edges;
  const auto triples = g.triples();
  for (uint32_t i : subset) {
    for (uint32_t j : subset) {
      if (i == j) continue;
      const Triple& a = triples[i];
      const Triple& b = triples[j];
      if (a.subject == b.subject) edges.insert({a.relation, b.relation, kHeadHead});
      if (a.subject == b.object) edges.insert({a.relation, b.relation, kHeadTail});
      if (a.object == b.subject) edges.insert({a.relation, b.relation, kTailHead});
      if (a.object == b.object) edges.insert({a.relation, b.relation, kTailTail});
    }
  }
  return edges;
}

inline std::vector<uint32_t> AllTriples(const KnowledgeGraph& g) {
  std::vector<uint32_t> all(g.triples().size());
  for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

inline std::vector<uint32_t> TriplesWithin(const KnowledgeGraph& g,
                                           const std::vector<EntityId>& nodes) {
  const std::set<EntityId> in(nodes.begin(), nodes.end());
  std::vector<uint32_t> out;
  for (uint32_t i = 0; i < g.triples().size(); ++i) {
    const Triple& t = g.triples()[i];
    if (in.count(t.subject) && in.count(t.object)) out.push_back(i);
  }
  return out;
}

// Support of each relation-graph edge when every triple of the listed
// relations is sampled: both endpoints contribute one neighborhood each.
inline std::map<RelationEdge, uint32_t> ExhaustiveSupport(const KnowledgeGraph& g,
                                                          std::span<const RelationId> relations,
                                                          uint64_t seed, uint32_t cap,
                                                          uint32_t hops,
                                                          uint32_t* neighborhoods) {
  std::map<RelationEdge, uint32_t> support;
  *neighborhoods = 0;
  for (RelationId r : relations) {
    for (const Triple& t : g.triples()) {
      if (t.relation != r) continue;
      for (EntityId e : {t.subject, t.object}) {
        const auto hood = BfsNeighborhood(g, e, DeriveSeed(seed, {e}), cap, hops);
        for (const RelationEdge& edge : PairwiseRelationEdges(g, TriplesWithin(g, hood.nodes))) {
          ++support[edge];
        }
        ++*neighborhoods;
      }
    }
  }
  return support;
}

// score_r = sum_b sum_i sum_j s[bk+i] W[b,r,i,j] o[bk+j]
inline std::vector<double> Bilinear(const std::vector<double>& s, const std::vector<double>& o,
                                    const Tensor& w, size_t k) {
  const size_t blocks = w.shape()[0], relations = w.shape()[1];
  std::vector<double> out(relations, 0.0);
  for (size_t r = 0; r < relations; ++r) {
    for (size_t b = 0; b < blocks; ++b) {
      for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) {
          const double wij = w[((b * relations + r) * k + i) * k + j];
          out[r] += s[b * k + i] * wij * o[b * k + j];
        }
      }
    }
  }
  return out;
}

}  // namespace kgre::oracle

#endif  // KGRE_TESTS_SUPPORT_ORACLES_H_
