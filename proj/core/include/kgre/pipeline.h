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

#ifndef KGRE_PIPELINE_H_
#define KGRE_PIPELINE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "kgre/sampler.h"
#include "kgre/tape.h"

namespace kgre {

struct FusionWeights {
  double alpha = 1.0;  // text
  double beta = 1.0;   // graph
};

// p = alpha p_t + beta p_g. A zero weight drops its term exactly, so
// beta = 0 returns alpha p_t bit for bit.
Tensor Fuse(const Tensor& text, const Tensor& graph, const FusionWeights& weights);
Var Fuse(Var text, Var graph, const FusionWeights& weights);

enum class DecisionMode { kMultiLabel, kSingleLabel };

// Multi-label: every slot r > 0 with p_r > p_0 (slot 0 is the threshold).
// Single-label: the argmax, lowest index on ties. Returns logit slots.
std::vector<uint32_t> DecideLabels(const Tensor& logits, DecisionMode mode);

// A decided relation between two subgraph nodes; `relation` indexes R.
struct PairPrediction {
  LocalId subject = 0;
  LocalId object = 0;
  uint32_t relation = 0;
};

struct Enrichment {
  Subgraph graph;
  size_t added_edges = 0;
  size_t skipped = 0;  // predictions with an unlinked or unknown endpoint
};

// Adds (u, base_types + r, v) and (v, base_types + |R| + r, u) for each
// prediction whose endpoints are linked subgraph nodes. base_types is the
// number of inverse-augmented graph relation types.
Enrichment EnrichSubgraph(const Subgraph& sub, std::span<const PairPrediction> predictions,
                          size_t base_types, size_t relation_count);

}  // namespace kgre

#endif  // KGRE_PIPELINE_H_
