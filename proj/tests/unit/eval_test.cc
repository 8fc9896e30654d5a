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

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "kgre/error.h"
#include "kgre/eval.h"
#include "kgre/rng.h"
#include "support/metric_cases.h"

namespace kgre {
namespace {

using testing::MacroCases;
using testing::MicroCases;
using testing::T;

TEST(MicroPrf, HandWorkedCases) {
  const auto cases = MicroCases();
  ASSERT_GE(cases.size(), 10u);
  for (const auto& c : cases) {
    Prf m = MicroPrf(c.preds, c.gold, c.ignore);
    EXPECT_NEAR(m.precision, c.precision, 1e-12) << c.name;
    EXPECT_NEAR(m.recall, c.recall, 1e-12) << c.name;
    EXPECT_NEAR(m.f1, c.f1, 1e-12) << c.name;
  }
}

TEST(MicroPrf, CountsAreReported) {
  Prf m = MicroPrf({T("d", "a", "b", "r"), T("d", "a", "c", "r")},
                   {T("d", "a", "b", "r"), T("d", "c", "a", "r"), T("d", "c", "b", "r")});
  EXPECT_EQ(m.true_positives, 1u);
  EXPECT_EQ(m.false_positives, 1u);
  EXPECT_EQ(m.false_negatives, 2u);
}

TEST(MicroPrf, BoundsAndHarmonicMean) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    LabeledTripleSet preds, gold;
    for (int i = 0; i < 12; ++i) {
      LabeledTriple t = T("d" + std::to_string(rng.Below(2)), "e" + std::to_string(rng.Below(3)),
                          "e" + std::to_string(rng.Below(3)), "r" + std::to_string(rng.Below(2)));
      if (rng.Bernoulli(0.5)) preds.insert(t);
      if (rng.Bernoulli(0.5)) gold.insert(t);
    }
    Prf m = MicroPrf(preds, gold);
    EXPECT_GE(m.f1, 0.0);
    EXPECT_LE(m.f1, 1.0);
    EXPECT_LE(m.f1, std::max(m.precision, m.recall) + 1e-15);
    EXPECT_GE(m.f1, std::min(m.precision, m.recall) - 1e-15);
    EXPECT_EQ(MicroPrf(gold, gold).f1, gold.empty() ? 0.0 : 1.0);
  }
}

TEST(MacroF1, HandWorkedCases) {
  for (const auto& c : MacroCases()) {
    EXPECT_NEAR(MacroF1(c.preds, c.gold, c.classes), c.macro_f1, 1e-12) << c.name;
  }
}

TEST(MacroF1, EmptyClassListThrows) {
  std::vector<std::string> none;
  EXPECT_THROW(MacroF1({}, {}, none), Error);
}

TEST(Ratios, ZeroDenominator) {
  EXPECT_EQ(SafeRatio(3, 0), 0.0);
  EXPECT_EQ(F1Score(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(F1Score(0.5, 1.0), 2.0 / 3.0);
}

std::vector<uint32_t> ExampleRelations(size_t relations, size_t per) {
  std::vector<uint32_t> out;
  for (uint32_t r = 0; r < relations; ++r) {
    for (size_t i = 0; i < per; ++i) out.push_back(r);
  }
  return out;
}

TEST(ZeroShotSplits, DisjointAndComplete) {
  const auto ex = ExampleRelations(20, 3);
  const auto splits = ZeroShotSplits(ex, 20, 5, 5, 42);
  ASSERT_EQ(splits.size(), 5u);
  std::set<uint64_t> seeds;
  std::set<std::vector<uint32_t>> test_sets;
  for (const auto& s : splits) {
    seeds.insert(s.seed);
    test_sets.insert(s.test_relations);
    EXPECT_EQ(s.test_relations.size(), 5u);
    EXPECT_EQ(s.train_relations.size(), 15u);
    EXPECT_TRUE(std::is_sorted(s.test_relations.begin(), s.test_relations.end()));
    std::set<uint32_t> test(s.test_relations.begin(), s.test_relations.end());
    for (uint32_t r : s.train_relations) EXPECT_FALSE(test.count(r));
    EXPECT_EQ(s.train_examples.size() + s.test_examples.size(), ex.size());
    for (size_t e : s.test_examples) EXPECT_TRUE(test.count(ex[e]));
    for (size_t e : s.train_examples) EXPECT_FALSE(test.count(ex[e]));
  }
  EXPECT_EQ(seeds.size(), 5u);
  EXPECT_GT(test_sets.size(), 1u);
}

TEST(ZeroShotSplits, Deterministic) {
  const auto ex = ExampleRelations(8, 2);
  const auto a = ZeroShotSplits(ex, 8, 3, 4, 7);
  const auto b = ZeroShotSplits(ex, 8, 3, 4, 7);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].test_relations, b[i].test_relations);
    EXPECT_EQ(a[i].test_examples, b[i].test_examples);
  }
  const auto c = ZeroShotSplits(ex, 8, 3, 4, 8);
  EXPECT_NE(a[0].seed, c[0].seed);
}

TEST(ZeroShotSplits, RejectsBadSizes) {
  const auto ex = ExampleRelations(5, 1);
  EXPECT_THROW(ZeroShotSplits(ex, 5, 5, 1, 0), Error);
  EXPECT_THROW(ZeroShotSplits(ex, 5, 0, 1, 0), Error);
  std::vector<uint32_t> bad{0, 9};
  EXPECT_THROW(ZeroShotSplits(bad, 5, 2, 1, 0), Error);
}

TEST(Predictions, RoundTrip) {
  std::vector<ScoredTriple> preds{{T("d1", "a", "b", "r"), 1.5}, {T("d2", "x y", "z", "s"), -0.25}};
  std::stringstream buf;
  WritePredictions(buf, preds);
  EXPECT_EQ(buf.str(), "d1\ta\tb\tr\t1.500000\nd2\tx y\tz\ts\t-0.250000\n");
  auto back = ReadPredictions(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].triple, preds[1].triple);
  EXPECT_EQ(back[1].score, -0.25);
  EXPECT_EQ(ToTripleSet(back).size(), 2u);
}

TEST(Predictions, FourFieldsAndErrors) {
  std::istringstream ok("# header\nd\ta\tb\tr\n");
  auto p = ReadPredictions(ok);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].score, 0.0);
  std::istringstream short_line("d\ta\tb\tr\n\nd\ta\n");
  try {
    ReadPredictions(short_line);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream bad_score("d\ta\tb\tr\tnope\n");
  EXPECT_THROW(ReadPredictions(bad_score), ParseError);
}

TEST(FormatResults, TableThenKeyValues) {
  std::vector<std::pair<std::string, double>> m{{"f1", 0.5}, {"ign_f1", 2.0 / 3.0}};
  EXPECT_EQ(FormatResults(m),
            "metric  value\n"
            "f1      0.5000\n"
            "ign_f1  0.6667\n"
            "f1=0.500000\n"
            "ign_f1=0.666667\n");
}

}  // namespace
}  // namespace kgre
