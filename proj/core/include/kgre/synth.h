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

#ifndef KGRE_SYNTH_H_
#define KGRE_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace kgre {

struct SynthOptions {
  std::string kind;           // linkpred | doclevel | zeroshot
  uint64_t seed = 1;
  size_t entities = 60;       // linkpred
  size_t documents = 16;      // doclevel, even: twins share exports
  size_t examples_per_relation = 12;  // zeroshot
  size_t width = 16;          // encoder width of synthetic exports
};

struct SynthSummary {
  std::vector<std::string> files;  // relative to the output directory
  size_t triples = 0;
  size_t documents = 0;
};

// Writes kg.tsv, relations.tsv, document files, encoder exports and a
// train.cfg into `dir`. The same options always produce the same bytes.
//
// linkpred: base relations r0..r2 with r3 = r1.r2, r4 = r2.r0, r5 = r0.r1.
//   Each query pair is joined by exactly one rule path; dev and test
//   composite triples are absent from the graph.
// doclevel: twin documents share encoder exports but link to different
//   nodes. Labels G0/G1 follow direct graph edges, T0 follows role vectors
//   planted in marker encodings.
// zeroshot: six target relations, each a distinct two-hop composition of
//   four base relations; per-relation exports carry a weak match signal.
SynthSummary GenerateFixture(const SynthOptions& options, const std::filesystem::path& dir);

}  // namespace kgre

#endif  // KGRE_SYNTH_H_
