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

#ifndef KGRE_EVAL_H_
#define KGRE_EVAL_H_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kgre {

struct LabeledTriple {
  std::string document;
  std::string subject;
  std::string object;
  std::string relation;

  auto operator<=>(const LabeledTriple&) const = default;
};

using LabeledTripleSet = std::set<LabeledTriple>;

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t true_positives = 0;
  size_t false_positives = 0;
  size_t false_negatives = 0;
};

// num / den, or 0 when den is 0.
double SafeRatio(double num, double den);
// 2PR / (P + R), or 0 when P + R is 0.
double F1Score(double precision, double recall);

// Micro P/R/F1. Triples whose (subject, object, relation) appears in
// `ignore` under any document are dropped from both sides first.
Prf MicroPrf(const LabeledTripleSet& preds, const LabeledTripleSet& gold,
             const LabeledTripleSet& ignore = {});

// Per-class F1 averaged over the listed classes that occur in gold or preds.
// Throws when `classes` is empty. Returns 0 when no listed class occurs.
double MacroF1(const LabeledTripleSet& preds, const LabeledTripleSet& gold,
               std::span<const std::string> classes);

struct ZeroShotSplit {
  uint64_t seed = 0;
  std::vector<uint32_t> train_relations;  // ascending
  std::vector<uint32_t> test_relations;   // ascending
  std::vector<size_t> train_examples;
  std::vector<size_t> test_examples;
};

// `example_relations[i]` is the gold relation of example i. Each resample
// draws m test relations uniformly with its own derived seed; examples of
// test relations go to test_examples, the rest to train_examples.
// Throws unless 1 <= m < relation_count.
std::vector<ZeroShotSplit> ZeroShotSplits(std::span<const uint32_t> example_relations,
                                          size_t relation_count, size_t m,
                                          size_t resamples, uint64_t seed);

struct ScoredTriple {
  LabeledTriple triple;
  double score = 0.0;
};

// doc<TAB>subject<TAB>object<TAB>relation<TAB>score per line.
void WritePredictions(std::ostream& out, std::span<const ScoredTriple> preds);
std::vector<ScoredTriple> ReadPredictions(std::istream& in);
LabeledTripleSet ToTripleSet(std::span<const ScoredTriple> preds);

// Aligned table followed by key=value lines, in the given order.
std::string FormatResults(std::span<const std::pair<std::string, double>> metrics);

}  // namespace kgre

#endif  // KGRE_EVAL_H_
