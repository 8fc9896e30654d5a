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

#include "kgre/pipeline.h"

#include <algorithm>

#include "kgre/error.h"
#include "kgre/ops.h"

namespace kgre {

Tensor Fuse(const Tensor& text, const Tensor& graph, const FusionWeights& weights) {
  if (text.shape() != graph.shape()) {
    throw ShapeError("Fuse: " + ShapeToString(text.shape()) + " vs " +
                     ShapeToString(graph.shape()));
  }
  Tensor out(text.shape());
  for (size_t i = 0; i < out.size(); ++i) {
    double v = 0.0;
    if (weights.alpha != 0.0) v = weights.alpha * text[i];
    if (weights.beta != 0.0) v += weights.beta * graph[i];
    out[i] = v;
  }
  return out;
}

Var Fuse(Var text, Var graph, const FusionWeights& weights) {
  if (text.shape() != graph.shape()) {
    throw ShapeError("Fuse: " + ShapeToString(text.shape()) + " vs " +
                     ShapeToString(graph.shape()));
  }
  if (weights.beta == 0.0) return weights.alpha == 1.0 ? text : ops::Scale(text, weights.alpha);
  if (weights.alpha == 0.0) return weights.beta == 1.0 ? graph : ops::Scale(graph, weights.beta);
  Var a = weights.alpha == 1.0 ? text : ops::Scale(text, weights.alpha);
  Var b = weights.beta == 1.0 ? graph : ops::Scale(graph, weights.beta);
  return ops::Add(a, b);
}

std::vector<uint32_t> DecideLabels(const Tensor& logits, DecisionMode mode) {
  std::vector<uint32_t> out;
  if (logits.size() == 0) return out;
  if (mode == DecisionMode::kMultiLabel) {
    for (uint32_t r = 1; r < logits.size(); ++r) {
      if (logits[r] > logits[0]) out.push_back(r);
    }
    return out;
  }
  uint32_t best = 0;
  for (uint32_t r = 1; r < logits.size(); ++r) {
    if (logits[r] > logits[best]) best = r;
  }
  out.push_back(best);
  return out;
}

Enrichment EnrichSubgraph(const Subgraph& sub, std::span<const PairPrediction> predictions,
                          size_t base_types, size_t relation_count) {
  Enrichment out;
  out.graph = sub;
  if (predictions.empty()) return out;
  std::vector<SubgraphEdge> added;
  for (const PairPrediction& p : predictions) {
    if (p.relation >= relation_count) {
      throw Error("predicted relation " + std::to_string(p.relation) + " outside R");
    }
    const bool linked = p.subject < sub.node_count() && p.object < sub.node_count() &&
                        sub.nodes[p.subject].has_value() && sub.nodes[p.object].has_value();
    if (!linked) {
      ++out.skipped;
      continue;
    }
    const RelationId forward = static_cast<RelationId>(base_types + p.relation);
    const RelationId inverse = static_cast<RelationId>(base_types + relation_count + p.relation);
    added.push_back({p.subject, p.object, forward});
    added.push_back({p.object, p.subject, inverse});
  }
  std::vector<SubgraphEdge>& edges = out.graph.edges;
  const size_t before = edges.size();
  edges.insert(edges.end(), added.begin(), added.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  out.added_edges = edges.size() - before;
  return out;
}

}  // namespace kgre
