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
#include "kgre/gradcheck_suite.h"
#include "kgre/ops.h"
#include "kgre/rng.h"
#include "kgre/tape.h"
#include "support/oracles.h"

namespace kgre {
namespace {

Tensor RandomTensor(Rng& rng, Shape shape) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.Normal();
  return t;
}

std::vector<double> Values(Var v) {
  auto s = v.value().values();
  return {s.begin(), s.end()};
}

TEST(Tensor, ShapeInvariants) {
  Tensor t(Shape{2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(Tensor::Scalar(2.0).size(), 1u);
  EXPECT_THROW(Tensor(Shape{2, 2}, std::vector<double>{1, 2, 3}), Error);
  EXPECT_THROW(t.Reshaped({4}), Error);
}

TEST(Kernels, Relu) {
  Tape tape;
  EXPECT_EQ(Values(ops::Relu(tape.Constant(Tensor::Vector({-1.0, 2.0})))),
            (std::vector<double>{0.0, 2.0}));
}

TEST(Kernels, RowNormalize) {
  Tape tape;
  EXPECT_EQ(Values(ops::RowNormalize(tape.Constant(Tensor::Matrix(1, 2, {2, 2})))),
            (std::vector<double>{0.5, 0.5}));
}

TEST(Kernels, MatMulIdentity) {
  Rng rng(1);
  Tape tape;
  Tensor x = RandomTensor(rng, {3, 4});
  Var y = ops::MatMul(tape.Constant(Tensor::Matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1})),
                      tape.Constant(x));
  EXPECT_EQ(y.value(), x);
}

TEST(Kernels, ShapeMismatchNamesBothShapes) {
  Tape tape;
  Var a = tape.Constant(Tensor(Shape{2, 3}));
  Var b = tape.Constant(Tensor(Shape{2, 2}));
  try {
    ops::MatMul(a, b);
    FAIL();
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("[2x3]"), std::string::npos) << what;
    EXPECT_NE(what.find("[2x2]"), std::string::npos) << what;
  }
  EXPECT_THROW(ops::Add(a, b), ShapeError);
}

TEST(Kernels, TanhAndAddMul) {
  Tape tape;
  Var a = tape.Constant(Tensor::Vector({0.5, -1.0}));
  Var b = tape.Constant(Tensor::Vector({2.0, 3.0}));
  EXPECT_EQ(Values(ops::Add(a, b)), (std::vector<double>{2.5, 2.0}));
  EXPECT_EQ(Values(ops::Mul(a, b)), (std::vector<double>{1.0, -3.0}));
  EXPECT_EQ(Values(ops::Sub(a, b)), (std::vector<double>{-1.5, -4.0}));
  EXPECT_DOUBLE_EQ(ops::Tanh(a).value()[0], std::tanh(0.5));
}

TEST(Kernels, GatherAndScatter) {
  Tape tape;
  Var m = tape.Constant(Tensor::Matrix(3, 2, {1, 2, 3, 4, 5, 6}));
  std::vector<uint32_t> rows{2, 0, 2};
  EXPECT_EQ(Values(ops::GatherRows(m, rows)), (std::vector<double>{5, 6, 1, 2, 5, 6}));
  std::vector<uint32_t> index{1, 1, 0};
  EXPECT_EQ(Values(ops::ScatterAddRows(m, index, 3)), (std::vector<double>{5, 6, 4, 6, 0, 0}));
}

TEST(LogSumExpPool, Singleton) {
  Tape tape;
  std::vector<double> v{0.3, -2.0, 7.5};
  Var out = ops::LogSumExpPool(tape.Constant(Tensor::Matrix(1, 3, v)));
  EXPECT_EQ(Values(out), v);
}

TEST(LogSumExpPool, DuplicateAddsLogTwo) {
  Tape tape;
  Var out = ops::LogSumExpPool(tape.Constant(Tensor::Matrix(2, 2, {1.0, -4.0, 1.0, -4.0})));
  EXPECT_NEAR(out.value()[0], 1.0 + std::log(2.0), 1e-15);
  EXPECT_NEAR(out.value()[1], -4.0 + std::log(2.0), 1e-15);
}

TEST(LogSumExpPool, MatchesDirectFormula) {
  Rng rng(8);
  Tensor x = RandomTensor(rng, {3, 4});
  Tape tape;
  Var out = ops::LogSumExpPool(tape.Constant(x));
  for (size_t j = 0; j < 4; ++j) {
    double sum = 0.0;
    for (size_t i = 0; i < 3; ++i) sum += std::exp(x.at(i, j));
    EXPECT_NEAR(out.value()[j], std::log(sum), 1e-12);
  }
}

TEST(LogSumExpPool, EmptyThrows) {
  Tape tape;
  EXPECT_THROW(ops::LogSumExpPool(tape.Constant(Tensor(Shape{0, 3}))), Error);
}

TEST(LogSumExpPool, PermutationInvariantAndAboveMax) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor x = RandomTensor(rng, {5, 3});
    std::vector<uint32_t> perm{3, 1, 4, 0, 2};
    Tape tape;
    Var a = ops::LogSumExpPool(tape.Constant(x));
    Var b = ops::LogSumExpPool(ops::GatherRows(tape.Constant(x), perm));
    for (size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(a.value()[j], b.value()[j], 1e-12);
      double mx = x.at(0, j);
      for (size_t i = 1; i < 5; ++i) mx = std::max(mx, x.at(i, j));
      EXPECT_GE(a.value()[j], mx);
    }
  }
}

TEST(PnaAggregate, SingletonGroup) {
  Tape tape;
  std::vector<uint32_t> dest{0};
  Var out = ops::PnaAggregate(tape.Constant(Tensor::Matrix(1, 2, {1.5, -2.0})), dest, 1);
  EXPECT_EQ(Values(out), (std::vector<double>{1.5, -2.0, 1.5, -2.0, 1.5, -2.0, 0.0, 0.0}));
}

TEST(PnaAggregate, TwoMessagesHandArithmetic) {
  Tape tape;
  std::vector<uint32_t> dest{0, 0};
  Var out = ops::PnaAggregate(tape.Constant(Tensor::Matrix(2, 1, {1.0, 3.0})), dest, 1);
  EXPECT_EQ(Values(out), (std::vector<double>{2.0, 3.0, 1.0, 1.0}));
}

TEST(PnaAggregate, EmptyGroupIsZero) {
  Tape tape;
  std::vector<uint32_t> dest{1};
  Var out = ops::PnaAggregate(tape.Constant(Tensor::Matrix(1, 1, {4.0})), dest, 2);
  EXPECT_EQ(out.value().Row(0).values()[0], 0.0);
  for (size_t c = 0; c < 4; ++c) EXPECT_EQ(out.value().at(0, c), 0.0);
}

TEST(PnaAggregate, PermutationInvariantNonNegativeStd) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t e = 7, d = 3, nodes = 3;
    Tensor m = RandomTensor(rng, {e, d});
    std::vector<uint32_t> dest(e);
    for (auto& x : dest) x = static_cast<uint32_t>(rng.Below(nodes));
    std::vector<uint32_t> perm{6, 2, 0, 5, 1, 3, 4};
    std::vector<uint32_t> dest_perm(e);
    for (size_t i = 0; i < e; ++i) dest_perm[i] = dest[perm[i]];
    Tape tape;
    Var a = ops::PnaAggregate(tape.Constant(m), dest, nodes);
    Var b = ops::PnaAggregate(ops::GatherRows(tape.Constant(m), perm), dest_perm, nodes);
    for (size_t i = 0; i < a.value().size(); ++i) {
      EXPECT_NEAR(a.value()[i], b.value()[i], 1e-12);
    }
    for (size_t v = 0; v < nodes; ++v) {
      for (size_t c = 3 * d; c < 4 * d; ++c) EXPECT_GE(a.value().at(v, c), 0.0);
    }
  }
}

TEST(GroupedBilinear, ZeroWeight) {
  Rng rng(2);
  Tape tape;
  Var out = ops::GroupedBilinear(tape.Constant(RandomTensor(rng, {4})),
                                 tape.Constant(RandomTensor(rng, {4})),
                                 tape.Constant(Tensor(Shape{2, 3, 2, 2})), 2);
  EXPECT_EQ(Values(out), (std::vector<double>{0, 0, 0}));
}

TEST(GroupedBilinear, IdentityIsDotProduct) {
  Tape tape;
  Var out = ops::GroupedBilinear(tape.Constant(Tensor::Vector({2.0, -1.0})),
                                 tape.Constant(Tensor::Vector({0.5, 3.0})),
                                 tape.Constant(Tensor(Shape{1, 1, 2, 2}, {1, 0, 0, 1})), 2);
  EXPECT_EQ(Values(out), (std::vector<double>{2.0 * 0.5 - 3.0}));
}

TEST(GroupedBilinear, MatchesTripleLoopOracle) {
  Rng rng(13);
  for (size_t k : {2u, 4u}) {
    Tensor s = RandomTensor(rng, {4}), o = RandomTensor(rng, {4});
    Tensor w = RandomTensor(rng, {4 / k, 3, k, k});
    Tape tape;
    Var out = ops::GroupedBilinear(tape.Constant(s), tape.Constant(o), tape.Constant(w), k);
    const auto expected = oracle::Bilinear(Values(tape.Constant(s)), Values(tape.Constant(o)),
                                           w, k);
    for (size_t r = 0; r < 3; ++r) EXPECT_NEAR(out.value()[r], expected[r], 1e-10);
  }
}

TEST(GroupedBilinear, BlockMustDivideWidth) {
  Tape tape;
  EXPECT_THROW(ops::GroupedBilinear(tape.Constant(Tensor(Shape{4})),
                                    tape.Constant(Tensor(Shape{4})),
                                    tape.Constant(Tensor(Shape{1, 1, 3, 3})), 3),
               Error);
}

TEST(Backward, IdentityGradientIsOne) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Scalar(3.0));
  tape.Backward(ops::Sum(x));
  EXPECT_EQ(tape.Grad(x)[0], 1.0);
}

TEST(Backward, ReluAtNegativeInput) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Vector({-1.0}));
  tape.Backward(ops::Sum(ops::Relu(x)));
  EXPECT_EQ(tape.Grad(x)[0], 0.0);
}

TEST(Backward, UnusedLeafGetsZeroGradient) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Vector({1.0, 2.0}));
  Var unused = tape.Leaf(Tensor::Vector({5.0}));
  tape.Backward(ops::Sum(ops::Mul(x, x)));
  EXPECT_EQ(tape.Grad(x)[1], 4.0);
  EXPECT_EQ(tape.Grad(unused)[0], 0.0);
}

TEST(Backward, NonScalarOutputThrows) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Vector({1.0, 2.0}));
  EXPECT_THROW(tape.Backward(x), ShapeError);
}

TEST(Backward, SharedParameterAccumulates) {
  ParameterStore store;
  Parameter& p = store.Add("p", Tensor::Vector({2.0}), kTextGroup);
  Tape tape;
  Var a = tape.Param(p);
  Var b = tape.Param(p);
  EXPECT_EQ(a.id(), b.id());
  tape.Backward(ops::Sum(ops::Mul(a, b)));
  auto grads = tape.ParameterGradients();
  ASSERT_EQ(grads.size(), 1u);
  EXPECT_EQ((*grads[0].second)[0], 4.0);
}

TEST(CheckGradients, LinearFunctionIsExact) {
  Rng rng(6);
  const double err = CheckGradients(
      [](Tape&, std::span<const Var> in) {
        return ops::Sum(ops::Add(ops::Scale(in[0], 3.0), ops::Scale(in[1], -2.0)));
      },
      {RandomTensor(rng, {3}), RandomTensor(rng, {3})});
  EXPECT_LE(err, 1e-9);
}

TEST(CheckGradients, ThreeLayerComposite) {
  Rng rng(17);
  const double err = CheckGradients(
      [](Tape&, std::span<const Var> in) {
        Var h = ops::Tanh(ops::Linear(in[0], in[1], in[2]));
        h = ops::Tanh(ops::Linear(h, in[3], Var()));
        return ops::Sum(ops::Mul(h, h));
      },
      {RandomTensor(rng, {2, 3}), RandomTensor(rng, {4, 3}), RandomTensor(rng, {4}),
       RandomTensor(rng, {2, 4})});
  EXPECT_LT(err, 1e-6);
}

TEST(CheckGradients, DetectsAWrongBackwardRule) {
  const double err = CheckGradients(
      [](Tape& tape, std::span<const Var> in) {
        Tensor v = in[0].value();
        for (double& x : v.values()) x = x * x;
        return ops::Sum(tape.Record(v, {in[0]}, [x = in[0]](Tape& t, const Tensor& g) {
          t.GradSlot(x).AddScaled(g, 1.0);  // should be 2x
        }));
      },
      {Tensor::Vector({3.0})});
  EXPECT_GT(err, 0.5);
}

TEST(CheckGradients, NonFiniteThrows) {
  EXPECT_THROW(CheckGradients(
                   [](Tape&, std::span<const Var> in) {
                     return ops::Sum(ops::Scale(in[0], std::nan("")));
                   },
                   {Tensor::Vector({1.0})}),
               Error);
}

class GradientSuite : public ::testing::TestWithParam<std::string> {};

TEST_P(GradientSuite, PassesOnTwoSeeds) {
  for (uint64_t seed : {101u, 202u}) {
    EXPECT_LT(RunGradientCheck(GetParam(), seed), 1e-4) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(AllChecks, GradientSuite, ::testing::ValuesIn(GradientCheckNames()),
                         [](const auto& info) { return info.param; });

TEST(GradientSuiteNames, CoversKernelsLossesAndHeads) {
  const auto& names = GradientCheckNames();
  for (const char* want : {"matmul", "pna_aggregate", "grouped_bilinear", "logsumexp_pool",
                           "hinge_abl_loss", "text_supervised_head", "text_mc_head",
                           "nbf_stack", "ultra_stack"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  }
  EXPECT_THROW(RunGradientCheck("no_such_check", 1), Error);
}

}  // namespace
}  // namespace kgre
