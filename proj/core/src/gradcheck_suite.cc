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

#include "kgre/gradcheck_suite.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "kgre/error.h"
#include "kgre/gradcheck.h"
#include "kgre/graph_module.h"
#include "kgre/losses.h"
#include "kgre/ops.h"
#include "kgre/rng.h"
#include "kgre/text_head.h"
#include "kgre/ultra.h"

namespace kgre {
namespace {

Tensor Random(const Shape& shape, Rng& rng, double scale = 1.0) {
  Tensor t(shape);
  for (double& v : t.values()) v = scale * rng.Normal();
  return t;
}

// Values bounded away from zero so relu kinks stay out of the stencil.
Tensor AwayFromZero(const Shape& shape, Rng& rng) {
  Tensor t(shape);
  for (double& v : t.values()) {
    do {
      v = rng.Normal();
    } while (std::abs(v) < 1e-2);
  }
  return t;
}

// Random weighted sum, so every output coordinate matters.
Var Reduce(Var out, Rng& rng) {
  Tape& tape = out.tape();
  return ops::Sum(ops::Mul(out, tape.Constant(Random(out.shape(), rng))));
}

using KernelFn = std::function<Var(std::span<const Var>)>;

double Kernel(uint64_t seed, std::vector<Tensor> inputs, KernelFn fn) {
  Rng weights(DeriveSeed(seed, {0x77ULL}));
  const uint64_t wseed = weights.Next();
  return CheckGradients(
      [&](Tape&, std::span<const Var> x) {
        Rng rng(wseed);
        return Reduce(fn(x), rng);
      },
      std::move(inputs));
}

// Unit-scale parameters. At smaller scales deep stacks leave coordinates with
// gradients near 1e-8, where central-difference roundoff alone exceeds 1e-4.
void Randomize(ParameterStore& store, Rng& rng) {
  for (size_t i = 0; i < store.size(); ++i) {
    for (double& v : store[i].value.values()) v = rng.Normal();
  }
}

std::vector<Parameter*> All(ParameterStore& store) {
  std::vector<Parameter*> out;
  for (size_t i = 0; i < store.size(); ++i) out.push_back(&store[i]);
  return out;
}

double Composite(uint64_t seed, ParameterStore& store, const std::function<Var(Tape&)>& fn) {
  Rng rng(DeriveSeed(seed, {0x70ULL}));
  Randomize(store, rng);
  const uint64_t wseed = rng.Next();
  return CheckParameterGradients(
      [&](Tape& tape) {
        Rng w(wseed);
        return Reduce(fn(tape), w);
      },
      All(store));
}

MessageGraph RandomGraph(Rng& rng, uint32_t nodes, uint32_t edges, uint32_t types) {
  MessageGraph g;
  g.nodes = nodes;
  for (uint32_t e = 0; e < edges; ++e) {
    g.source.push_back(static_cast<uint32_t>(rng.Below(nodes)));
    g.target.push_back(static_cast<uint32_t>(rng.Below(nodes)));
    g.type.push_back(static_cast<uint32_t>(rng.Below(types)));
  }
  return g;
}

Subgraph ToSubgraph(const MessageGraph& g) {
  Subgraph sub;
  for (uint32_t v = 0; v < g.nodes; ++v) sub.nodes.push_back(v);
  for (size_t e = 0; e < g.source.size(); ++e) {
    sub.edges.push_back({g.source[e], g.target[e], g.type[e]});
  }
  std::sort(sub.edges.begin(), sub.edges.end());
  sub.edges.erase(std::unique(sub.edges.begin(), sub.edges.end()), sub.edges.end());
  for (uint32_t v = 0; v < g.nodes; ++v) sub.anchors.push_back(v);
  return sub;
}

using Check = std::function<double(uint64_t)>;

const std::map<std::string, Check>& Checks() {
  static const std::map<std::string, Check> checks = [] {
    std::map<std::string, Check> c;
    auto rng_for = [](uint64_t seed) { return Rng(DeriveSeed(seed, {0x696eULL})); };
    c["add"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 4}, r), Random({3, 4}, r)},
                    [](auto x) { return ops::Add(x[0], x[1]); });
    };
    c["sub"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 4}, r), Random({3, 4}, r)},
                    [](auto x) { return ops::Sub(x[0], x[1]); });
    };
    c["mul"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 4}, r), Random({3, 4}, r)},
                    [](auto x) { return ops::Mul(x[0], x[1]); });
    };
    c["scale"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 4}, r)}, [](auto x) { return ops::Scale(x[0], -1.7); });
    };
    c["add_bias"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 4}, r), Random({4}, r)},
                    [](auto x) { return ops::AddBias(x[0], x[1]); });
    };
    c["matmul"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 5}, r), Random({5, 2}, r)},
                    [](auto x) { return ops::MatMul(x[0], x[1]); });
    };
    c["linear"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 5}, r), Random({4, 5}, r), Random({4}, r)},
                    [](auto x) { return ops::Linear(x[0], x[1], x[2]); });
    };
    c["relu"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {AwayFromZero({3, 4}, r)}, [](auto x) { return ops::Relu(x[0]); });
    };
    c["tanh"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 4}, r)}, [](auto x) { return ops::Tanh(x[0]); });
    };
    c["row_normalize"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      Tensor a = Random({3, 4}, r);
      for (double& v : a.values()) v = std::exp(v);
      return Kernel(s, {a}, [](auto x) { return ops::RowNormalize(x[0]); });
    };
    c["concat_cols"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 2}, r), Random({3, 3}, r)},
                    [](auto x) { return ops::ConcatCols(x); });
    };
    c["concat_rows"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({2, 3}, r), Random({1, 3}, r)},
                    [](auto x) { return ops::ConcatRows(x); });
    };
    c["gather_rows"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({4, 3}, r)}, [](auto x) {
        const uint32_t rows[] = {2, 0, 2, 3};
        return ops::GatherRows(x[0], rows);
      });
    };
    c["select_row"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({4, 3}, r)}, [](auto x) { return ops::SelectRow(x[0], 1); });
    };
    c["scatter_add_rows"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({5, 3}, r)}, [](auto x) {
        const uint32_t index[] = {0, 2, 0, 1, 2};
        return ops::ScatterAddRows(x[0], index, 3);
      });
    };
    c["reshape"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({2, 6}, r)}, [](auto x) { return ops::Reshape(x[0], {3, 4}); });
    };
    c["sum"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({2, 3}, r)}, [](auto x) { return ops::Sum(x[0]); });
    };
    c["logsumexp_pool"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({3, 4}, r)}, [](auto x) { return ops::LogSumExpPool(x[0]); });
    };
    c["pna_aggregate"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({7, 3}, r)}, [](auto x) {
        const uint32_t destination[] = {0, 0, 1, 2, 2, 2, 0};
        return ops::PnaAggregate(x[0], destination, 4);
      });
    };
    c["grouped_bilinear"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({4}, r), Random({4}, r), Random({2, 3, 2, 2}, r)},
                    [](auto x) { return ops::GroupedBilinear(x[0], x[1], x[2], 2); });
    };
    // With |P| = |N| the threshold gradient can cancel to exactly zero, where
    // the clamped relative error only measures roundoff. A fixed random mix
    // in front keeps every input coordinate's gradient generic.
    c["hinge_abl_loss"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      Tensor x = Random({5}, r, 2.0);
      const Tensor mix = Random({5, 5}, r, 0.5);
      return Kernel(s, {x}, [mix](auto x) {
        const uint32_t gold[] = {1, 3};
        Var logits = ops::MatMul(ops::Reshape(x[0], {1, 5}), x[0].tape().Constant(mix));
        return ops::Reshape(HingeAblLoss(ops::Reshape(logits, {5}), gold), {1});
      });
    };
    c["cross_entropy_loss"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({4}, r)},
                    [](auto x) { return ops::Reshape(CrossEntropyLoss(x[0], 2), {1}); });
    };
    c["adaptive_threshold_loss"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      return Kernel(s, {Random({5}, r)}, [](auto x) {
        const uint32_t gold[] = {2, 4};
        return ops::Reshape(AdaptiveThresholdLoss(x[0], gold), {1});
      });
    };
    c["text_supervised_head"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      ParameterStore store;
      TextHead head(store, {4, 3, 2, 0}, r);
      Tensor hs = Random({4}, r), ho = Random({4}, r), ctx = Random({4}, r);
      return Composite(s, store, [&](Tape& t) { return head.SupervisedLogits(t, hs, ho, ctx); });
    };
    c["text_mc_head"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      ParameterStore store;
      TextHead head(store, {4, 1, 4, 3}, r);
      std::vector<Tensor> first = {Random({4}, r), Random({4}, r), Random({4}, r)};
      return Composite(s, store, [&](Tape& t) { return head.MultipleChoiceLogits(t, first); });
    };
    c["nbf_stack"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      ParameterStore store;
      NbfConfig nc;
      nc.hidden = 4;
      nc.layers = 3;
      nc.head_hidden = 4;
      nc.relation_types = 3;
      nc.outputs = 3;
      NbfModel model(store, nc, r);
      Subgraph sub = ToSubgraph(RandomGraph(r, 6, 9, 3));
      const NbfModel::PairQuery pairs[] = {{0, 1}, {0, 3}, {0, 5}, {2, 4}};
      return Composite(s, store, [&](Tape& t) {
        return ops::ConcatCols(model.ScoreAllPairs(t, sub, pairs));
      });
    };
    c["ultra_stack"] = [=](uint64_t s) {
      Rng r = rng_for(s);
      ParameterStore store;
      UltraConfig uc;
      uc.hidden = 4;
      uc.layers = 2;
      uc.head_hidden = 4;
      UltraModel model(store, uc, r);
      RelationGraph rg;
      rg.relations = 4;
      for (RelationId a = 0; a < 4; ++a) {
        for (RelationId b = 0; b < 4; ++b) {
          if (a != b && r.Bernoulli(0.5)) rg.edges.push_back({a, b, uint32_t(r.Below(4))});
        }
      }
      std::sort(rg.edges.begin(), rg.edges.end());
      rg.support.assign(rg.edges.size(), 0);
      Subgraph sub = ToSubgraph(RandomGraph(r, 5, 8, 4));
      const RelationId candidates[] = {0, 2};
      return Composite(s, store,
                       [&](Tape& t) { return model.Logits(t, sub, 0, 4, candidates, rg); });
    };
    return c;
  }();
  return checks;
}

}  // namespace

const std::vector<std::string>& GradientCheckNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : Checks()) out.push_back(name);
    return out;
  }();
  return names;
}

double RunGradientCheck(const std::string& name, uint64_t seed) {
  auto it = Checks().find(name);
  if (it == Checks().end()) throw Error("unknown gradient check '" + name + "'");
  return it->second(seed);
}

std::vector<GradientCheckRow> RunGradientSuite(size_t seeds, uint64_t base_seed) {
  std::vector<GradientCheckRow> rows;
  for (const std::string& name : GradientCheckNames()) {
    for (uint64_t s = base_seed; s < base_seed + seeds; ++s) {
      rows.push_back({name, s, RunGradientCheck(name, s)});
    }
  }
  return rows;
}

}  // namespace kgre
