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

#include "kgre/eval.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "kgre/error.h"
#include "kgre/rng.h"

namespace kgre {
namespace {

using PairRelation = std::tuple<std::string, std::string, std::string>;

PairRelation Key(const LabeledTriple& t) { return {t.subject, t.object, t.relation}; }

}  // namespace

double SafeRatio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double F1Score(double precision, double recall) {
  return SafeRatio(2.0 * precision * recall, precision + recall);
}

Prf MicroPrf(const LabeledTripleSet& preds, const LabeledTripleSet& gold,
             const LabeledTripleSet& ignore) {
  std::set<PairRelation> ignored;
  for (const LabeledTriple& t : ignore) ignored.insert(Key(t));
  auto kept = [&](const LabeledTriple& t) { return !ignored.contains(Key(t)); };

  Prf out;
  for (const LabeledTriple& t : preds) {
    if (!kept(t)) continue;
    if (gold.contains(t)) {
      ++out.true_positives;
    } else {
      ++out.false_positives;
    }
  }
  for (const LabeledTriple& t : gold) {
    if (kept(t) && !preds.contains(t)) ++out.false_negatives;
  }
  const double tp = static_cast<double>(out.true_positives);
  out.precision = SafeRatio(tp, tp + out.false_positives);
  out.recall = SafeRatio(tp, tp + out.false_negatives);
  out.f1 = F1Score(out.precision, out.recall);
  return out;
}

double MacroF1(const LabeledTripleSet& preds, const LabeledTripleSet& gold,
               std::span<const std::string> classes) {
  if (classes.empty()) throw Error("MacroF1 needs at least one class");
  struct Counts {
    size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<std::string, Counts> counts;
  for (const LabeledTriple& t : preds) {
    Counts& c = counts[t.relation];
    (gold.contains(t) ? c.tp : c.fp)++;
  }
  for (const LabeledTriple& t : gold) {
    if (!preds.contains(t)) counts[t.relation].fn++;
  }
  std::set<std::string> listed(classes.begin(), classes.end());
  double sum = 0.0;
  size_t n = 0;
  for (const std::string& cls : listed) {
    auto it = counts.find(cls);
    if (it == counts.end()) continue;
    const Counts& c = it->second;
    double p = SafeRatio(c.tp, c.tp + c.fp);
    double r = SafeRatio(c.tp, c.tp + c.fn);
    sum += F1Score(p, r);
    ++n;
  }
  return SafeRatio(sum, n);
}

std::vector<ZeroShotSplit> ZeroShotSplits(std::span<const uint32_t> example_relations,
                                          size_t relation_count, size_t m,
                                          size_t resamples, uint64_t seed) {
  if (m == 0 || m >= relation_count) {
    throw Error("zero-shot split needs 1 <= m < " + std::to_string(relation_count) +
                " test relations, got " + std::to_string(m));
  }
  for (uint32_t r : example_relations) {
    if (r >= relation_count) throw Error("example relation " + std::to_string(r) + " out of range");
  }
  std::vector<ZeroShotSplit> out;
  for (size_t i = 0; i < resamples; ++i) {
    ZeroShotSplit split;
    split.seed = DeriveSeed(seed, {0x7a65726f73686f74ULL, i});
    Rng rng(split.seed);
    std::vector<bool> test(relation_count, false);
    for (uint32_t r : rng.SampleWithoutReplacement(static_cast<uint32_t>(relation_count),
                                                   static_cast<uint32_t>(m))) {
      test[r] = true;
    }
    for (uint32_t r = 0; r < relation_count; ++r) {
      (test[r] ? split.test_relations : split.train_relations).push_back(r);
    }
    for (size_t e = 0; e < example_relations.size(); ++e) {
      (test[example_relations[e]] ? split.test_examples : split.train_examples).push_back(e);
    }
    out.push_back(std::move(split));
  }
  return out;
}

void WritePredictions(std::ostream& out, std::span<const ScoredTriple> preds) {
  char buf[64];
  for (const ScoredTriple& p : preds) {
    std::snprintf(buf, sizeof(buf), "%.6f", p.score);
    out << p.triple.document << '\t' << p.triple.subject << '\t' << p.triple.object << '\t'
        << p.triple.relation << '\t' << buf << '\n';
  }
}

std::vector<ScoredTriple> ReadPredictions(std::istream& in) {
  std::vector<ScoredTriple> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 4 && fields.size() != 5) {
      throw ParseError("expected 4 or 5 tab-separated fields", line_no);
    }
    ScoredTriple p;
    p.triple = {fields[0], fields[1], fields[2], fields[3]};
    if (fields.size() == 5) {
      try {
        p.score = std::stod(fields[4]);
      } catch (const std::exception&) {
        throw ParseError("bad score '" + fields[4] + "'", line_no);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

LabeledTripleSet ToTripleSet(std::span<const ScoredTriple> preds) {
  LabeledTripleSet out;
  for (const ScoredTriple& p : preds) out.insert(p.triple);
  return out;
}

std::string FormatResults(std::span<const std::pair<std::string, double>> metrics) {
  size_t width = 6;
  for (const auto& [name, value] : metrics) width = std::max(width, name.size());
  std::ostringstream out;
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%-*s  %s\n", static_cast<int>(width), "metric", "value");
  out << buf;
  for (const auto& [name, value] : metrics) {
    std::snprintf(buf, sizeof(buf), "%-*s  %.4f\n", static_cast<int>(width), name.c_str(), value);
    out << buf;
  }
  for (const auto& [name, value] : metrics) {
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    out << name << '=' << buf << '\n';
  }
  return out.str();
}

}  // namespace kgre
