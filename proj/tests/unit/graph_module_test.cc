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
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "kgre/error.h"
#include "kgre/gradcheck.h"
#include "kgre/graph_module.h"
#include "kgre/ops.h"

namespace kgre {
namespace {

Tensor RandomTensor(Rng& rng, Shape shape, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = scale * rng.Normal();
  return t;
}

NbfConfig SmallConfig(size_t types, size_t outputs) {
  NbfConfig c;
  c.hidden = 4;
  c.layers = 3;
  c.head_hidden = 5;
  c.relation_types = types;
  c.outputs = outputs;
  return c;
}

void Randomize(const NbfModel& model, Rng& rng) {
  for (Parameter* p : model.Parameters()) {
    for (double& v : p->value.values()) v = 0.5 * rng.Normal();
  }
}

Subgraph MakeSubgraph(size_t nodes, std::vector<SubgraphEdge> edges) {
  Subgraph sub;
  for (size_t i = 0; i < nodes; ++i) sub.nodes.emplace_back(static_cast<EntityId>(i));
  std::sort(edges.begin(), edges.end());
  sub.edges = std::move(edges);
  return sub;
}

TEST(BellmanFord, EdgelessGraphNonStartRowsIgnoreStartVector) {
  Rng rng(1);
  ParameterStore store;
  NbfModel model(store, SmallConfig(2, 3), rng);
  Randomize(model, rng);
  MessageGraph g;
  g.nodes = 4;
  Tape tape;
  Var a = model.Forward(tape, g, 1, tape.Constant(RandomTensor(rng, {4})));
  Var b = model.Forward(tape, g, 1, tape.Constant(RandomTensor(rng, {4})));
  for (size_t v : {0u, 2u, 3u}) {
    EXPECT_EQ(a.value().Row(v), b.value().Row(v));
    EXPECT_EQ(a.value().Row(v), a.value().Row(0));
  }
  EXPECT_NE(a.value().Row(1), b.value().Row(1));
}

TEST(BellmanFord, TwoNodeHandComputation) {
  Tape tape;
  const std::vector<double> g{0.8, -0.5}, r{1.5, 2.0};
  Tensor w(Shape{2, 8});
  for (size_t i = 0; i < 16; ++i) w[i] = 0.1 * static_cast<double>(i % 7) - 0.25;
  const std::vector<double> b{0.05, -0.1};
  NbfLayer layer{tape.Constant(w), tape.Constant(Tensor::Vector(b)),
                 tape.Constant(Tensor::Matrix(1, 2, r))};
  MessageGraph graph{2, {0}, {1}, {0}};
  Var out = BellmanFordPropagate(tape, graph, 0, tape.Constant(Tensor::Vector(g)),
                                 std::span<const NbfLayer>(&layer, 1));
  // x receives {m, 0}; the start node only its boundary vector g.
  const double m[] = {g[0] * r[0], g[1] * r[1]};
  std::vector<double> agg_x, agg_s;
  for (double v : m) agg_x.push_back(v / 2);
  for (double v : m) agg_x.push_back(std::max(v, 0.0));
  for (double v : m) agg_x.push_back(std::min(v, 0.0));
  for (double v : m) agg_x.push_back(std::abs(v) / 2);
  for (int k = 0; k < 3; ++k) agg_s.insert(agg_s.end(), g.begin(), g.end());
  agg_s.insert(agg_s.end(), {0.0, 0.0});
  for (size_t i = 0; i < 2; ++i) {
    double zx = b[i], zs = b[i];
    for (size_t j = 0; j < 8; ++j) {
      zx += w.at(i, j) * agg_x[j];
      zs += w.at(i, j) * agg_s[j];
    }
    EXPECT_NEAR(out.value().at(1, i), std::max(zx, 0.0), 1e-14);
    EXPECT_NEAR(out.value().at(0, i), std::max(zs, 0.0), 1e-14);
  }
}

TEST(BellmanFord, StartOutOfRangeThrows) {
  Tape tape;
  MessageGraph g{2, {}, {}, {}};
  EXPECT_THROW(BellmanFordPropagate(tape, g, 5, tape.Constant(Tensor(Shape{2})), {}), Error);
}

TEST(NbfModel, RelabelingPermutesRows) {
  Rng rng(2);
  ParameterStore store;
  NbfModel model(store, SmallConfig(3, 2), rng);
  Randomize(model, rng);
  Subgraph sub = MakeSubgraph(5, {{0, 1, 0}, {1, 2, 1}, {2, 0, 2}, {3, 4, 0}, {1, 3, 1}});
  const std::vector<LocalId> perm{3, 0, 4, 1, 2};  // old -> new
  std::vector<SubgraphEdge> moved;
  for (const auto& e : sub.edges) moved.push_back({perm[e.source], perm[e.target], e.relation});
  Subgraph permuted = MakeSubgraph(5, moved);
  Tape tape;
  Var a = model.Forward(tape, sub, 1);
  Var b = model.Forward(tape, permuted, perm[1]);
  for (LocalId v = 0; v < 5; ++v) {
    for (size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(a.value().at(v, j), b.value().at(perm[v], j), 1e-12);
    }
  }
}

TEST(NbfModel, UnknownRelationTypeThrows) {
  Rng rng(3);
  ParameterStore store;
  NbfModel model(store, SmallConfig(2, 2), rng);
  Tape tape;
  EXPECT_THROW(model.Forward(tape, MakeSubgraph(2, {{0, 1, 5}}), 0), Error);
}

TEST(NbfModel, ZeroOutputWeightGivesBias) {
  Rng rng(4);
  ParameterStore store;
  NbfModel model(store, SmallConfig(2, 3), rng);
  Randomize(model, rng);
  auto params = model.Parameters();
  params[params.size() - 2]->value.Fill(0.0);
  Tape tape;
  Var state = model.Forward(tape, MakeSubgraph(3, {{0, 1, 0}, {1, 2, 1}}), 0);
  for (LocalId v = 0; v < 3; ++v) {
    EXPECT_EQ(model.RelationLogits(tape, ops::SelectRow(state, v)).value(),
              params.back()->value);
  }
}

TEST(NbfModel, HeadMatchesHandEvaluation) {
  Rng rng(5);
  ParameterStore store;
  NbfConfig c = SmallConfig(1, 2);
  c.hidden = 2;
  c.head_hidden = 2;
  NbfModel model(store, c, rng);
  Randomize(model, rng);
  auto params = model.Parameters();
  const Tensor& w3 = params[params.size() - 4]->value;
  const Tensor& b3 = params[params.size() - 3]->value;
  const Tensor& w4 = params[params.size() - 2]->value;
  const Tensor& b4 = params[params.size() - 1]->value;
  const std::vector<double> g{0.4, -1.1};
  Tape tape;
  Var p = model.RelationLogits(tape, tape.Constant(Tensor::Vector(g)));
  for (size_t r = 0; r < 2; ++r) {
    double expected = b4[r];
    for (size_t i = 0; i < 2; ++i) {
      const double z = b3[i] + w3.at(i, 0) * g[0] + w3.at(i, 1) * g[1];
      expected += w4.at(r, i) * std::max(z, 0.0);
    }
    EXPECT_NEAR(p.value()[r], expected, 1e-14);
  }
}

TEST(NbfModel, UnreachableObjectsShareLogits) {
  Rng rng(6);
  ParameterStore store;
  NbfModel model(store, SmallConfig(2, 3), rng);
  Randomize(model, rng);
  Subgraph sub = MakeSubgraph(4, {{0, 1, 0}, {1, 0, 1}});
  Tape tape;
  Var state = model.Forward(tape, sub, 0);
  const Tensor a = model.RelationLogits(tape, ops::SelectRow(state, 2)).value();
  const Tensor b = model.RelationLogits(tape, ops::SelectRow(state, 3)).value();
  EXPECT_EQ(a, b);
}

TEST(NbfModel, StartIndependenceOfUnreachableNodes) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ParameterStore store;
    NbfModel model(store, SmallConfig(3, 2), rng);
    Randomize(model, rng);
    // Nodes 0..4 form the start's component; 5..9 only point into it.
    std::vector<SubgraphEdge> edges;
    for (int k = 0; k < 8; ++k) {
      edges.push_back({static_cast<LocalId>(rng.Below(5)), static_cast<LocalId>(rng.Below(5)),
                       static_cast<RelationId>(rng.Below(3))});
      edges.push_back({static_cast<LocalId>(5 + rng.Below(5)),
                       static_cast<LocalId>(rng.Below(10)),
                       static_cast<RelationId>(rng.Below(3))});
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    MessageGraph g = ToMessageGraph(MakeSubgraph(10, edges));
    Tape tape;
    Var a = model.Forward(tape, g, 0, tape.Constant(RandomTensor(rng, {4})));
    Var b = model.Forward(tape, g, 0, tape.Constant(RandomTensor(rng, {4})));
    for (size_t v = 5; v < 10; ++v) EXPECT_EQ(a.value().Row(v), b.value().Row(v));
  }
}

TEST(ScoreAllPairs, OneSubjectOnePass) {
  Rng rng(8);
  ParameterStore store;
  NbfModel model(store, SmallConfig(2, 3), rng);
  Randomize(model, rng);
  Subgraph sub = MakeSubgraph(4, {{0, 1, 0}, {1, 2, 1}, {2, 3, 0}, {3, 0, 1}});
  std::vector<NbfModel::PairQuery> pairs{{0, 1}, {0, 2}, {0, 3}};
  Tape tape;
  size_t passes = 0;
  auto logits = model.ScoreAllPairs(tape, sub, pairs, &passes);
  EXPECT_EQ(passes, 1u);
  ASSERT_EQ(logits.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    Tape fresh;
    Var state = model.Forward(fresh, sub, 0);
    Var single = model.RelationLogits(fresh, ops::SelectRow(state, pairs[i].object));
    EXPECT_EQ(logits[i].value(), single.value());
  }
  std::vector<NbfModel::PairQuery> none;
  model.ScoreAllPairs(tape, sub, none, &passes);
  EXPECT_EQ(passes, 0u);
  std::vector<NbfModel::PairQuery> two{{0, 1}, {2, 1}, {0, 3}};
  model.ScoreAllPairs(tape, sub, two, &passes);
  EXPECT_EQ(passes, 2u);
}

TEST(NbfModel, SharedRelationTableOption) {
  Rng rng(9);
  ParameterStore shared_store, layered_store;
  NbfConfig c = SmallConfig(2, 2);
  c.share_relation_embeddings = true;
  NbfModel shared(shared_store, c, rng);
  NbfModel layered(layered_store, SmallConfig(2, 2), rng);
  EXPECT_EQ(layered.Parameters().size() - shared.Parameters().size(), c.layers - 1);
}

TEST(NbfModel, PipelineGradientCheckOnSixNodes) {
  Rng rng(10);
  ParameterStore store;
  NbfModel model(store, SmallConfig(4, 3), rng);
  Randomize(model, rng);
  Subgraph sub = MakeSubgraph(6, {{0, 1, 0}, {1, 2, 1}, {2, 3, 2}, {3, 4, 3}, {4, 5, 0},
                                  {5, 0, 1}, {1, 4, 2}, {2, 0, 3}, {3, 1, 0}});
  Tensor mix = RandomTensor(rng, {3});
  auto params = model.Parameters();
  const double err = CheckParameterGradients(
      [&](Tape& tape) {
        Var state = model.Forward(tape, sub, 0);
        Var p = model.RelationLogits(tape, ops::SelectRow(state, 4));
        return ops::Sum(ops::Mul(p, tape.Constant(mix)));
      },
      params);
  EXPECT_LT(err, 1e-4);
}

}  // namespace
}  // namespace kgre
