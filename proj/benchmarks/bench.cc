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

#include <algorithm>
#include <optional>
#include <vector>

#include <benchmark/benchmark.h>

#include "kgre/graph_module.h"
#include "kgre/ops.h"
#include "kgre/rng.h"
#include "kgre/sampler.h"
#include "kgre/ultra.h"

namespace kgre {
namespace {

KnowledgeGraph RandomGraph(Rng& rng, size_t nodes, size_t triples, size_t relations) {
  KnowledgeGraph::Builder b;
  for (size_t i = 0; i < triples; ++i) {
    b.Add("n" + std::to_string(rng.Below(nodes)), "r" + std::to_string(rng.Below(relations)),
          "n" + std::to_string(rng.Below(nodes)));
  }
  return std::move(b).Build().WithInverseRelations();
}

Subgraph RandomSubgraph(Rng& rng, size_t nodes, size_t edges, size_t types) {
  Subgraph sub;
  for (size_t i = 0; i < nodes; ++i) sub.nodes.emplace_back(static_cast<EntityId>(i));
  for (size_t k = 0; k < edges; ++k) {
    sub.edges.push_back({static_cast<LocalId>(rng.Below(nodes)),
                         static_cast<LocalId>(rng.Below(nodes)),
                         static_cast<RelationId>(rng.Below(types))});
  }
  std::sort(sub.edges.begin(), sub.edges.end());
  sub.edges.erase(std::unique(sub.edges.begin(), sub.edges.end()), sub.edges.end());
  return sub;
}

void BM_NbfForward(benchmark::State& state) {
  const size_t nodes = static_cast<size_t>(state.range(0));
  Rng rng(1);
  NbfConfig c;
  c.hidden = 32;
  c.layers = 4;
  c.head_hidden = 32;
  c.relation_types = 8;
  c.outputs = 10;
  ParameterStore store;
  NbfModel model(store, c, rng);
  const Subgraph sub = RandomSubgraph(rng, nodes, 4 * nodes, c.relation_types);
  for (auto _ : state) {
    Tape tape;
    benchmark::DoNotOptimize(model.Forward(tape, sub, 0).value().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(sub.edges.size()));
}
BENCHMARK(BM_NbfForward)->Arg(50)->Arg(200)->Arg(1000);

void BM_NbfForwardBackward(benchmark::State& state) {
  Rng rng(2);
  NbfConfig c;
  c.relation_types = 8;
  c.outputs = 10;
  ParameterStore store;
  NbfModel model(store, c, rng);
  const Subgraph sub = RandomSubgraph(rng, 200, 800, c.relation_types);
  for (auto _ : state) {
    Tape tape;
    Var loss = ops::Sum(model.Forward(tape, sub, 0));
    tape.Backward(loss);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_NbfForwardBackward);

void BM_GroupedBilinear(benchmark::State& state) {
  const size_t width = static_cast<size_t>(state.range(0)), block = 64, relations = 97;
  Rng rng(3);
  Tensor s(Shape{width}), o(Shape{width}), w(Shape{width / block, relations, block, block});
  for (double& v : s.values()) v = rng.Normal();
  for (double& v : o.values()) v = rng.Normal();
  for (double& v : w.values()) v = 0.01 * rng.Normal();
  for (auto _ : state) {
    Tape tape;
    Var out = ops::GroupedBilinear(tape.Constant(s), tape.Constant(o), tape.Constant(w), block);
    benchmark::DoNotOptimize(out.value().data());
  }
}
BENCHMARK(BM_GroupedBilinear)->Arg(256)->Arg(768);

void BM_DocumentSubgraph(benchmark::State& state) {
  Rng rng(4);
  const KnowledgeGraph g = RandomGraph(rng, 5000, static_cast<size_t>(state.range(0)), 20);
  std::vector<std::optional<EntityId>> anchors;
  for (int i = 0; i < 8; ++i) anchors.emplace_back(static_cast<EntityId>(rng.Below(g.entity_count())));
  uint64_t seed = 0;
  for (auto _ : state) {
    Subgraph sub = BuildDocumentSubgraph(g, anchors, ++seed);
    benchmark::DoNotOptimize(sub.edges.data());
  }
}
BENCHMARK(BM_DocumentSubgraph)->Arg(20000)->Arg(100000);

void BM_RelationGraph(benchmark::State& state) {
  Rng rng(5);
  const KnowledgeGraph g = RandomGraph(rng, 2000, static_cast<size_t>(state.range(0)), 30);
  for (auto _ : state) {
    RelationGraph rg = BuildRelationGraph(g);
    benchmark::DoNotOptimize(rg.edges.data());
  }
}
BENCHMARK(BM_RelationGraph)->Arg(10000)->Arg(50000);

}  // namespace
}  // namespace kgre

BENCHMARK_MAIN();
