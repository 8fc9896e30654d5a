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

#include "kgre/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kgre/document.h"
#include "kgre/encoder_export.h"
#include "kgre/error.h"
#include "kgre/kg_store.h"
#include "kgre/rng.h"

namespace kgre {
namespace {

namespace fs = std::filesystem;

struct TripleText {
  std::string s, r, o;
};

class FixtureWriter {
 public:
  explicit FixtureWriter(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }

  void Text(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    out << content;
    summary_.files.push_back(name);
  }

  void Triples(const std::vector<TripleText>& triples) {
    std::ostringstream out;
    for (const auto& t : triples) out << t.s << '\t' << t.r << '\t' << t.o << '\n';
    summary_.triples = triples.size();
    Text("kg.tsv", out.str());
  }

  void Relations(const std::vector<RelationMeta>& relations) {
    std::ostringstream out;
    WriteRelationMeta(out, relations);
    Text("relations.tsv", out.str());
  }

  void Docs(const std::string& name, const std::vector<DocumentRecord>& docs) {
    std::ostringstream out;
    WriteDocumentFile(out, docs);
    summary_.documents += docs.size();
    Text(name, out.str());
  }

  void Export(const std::string& name, const EncoderOutput& enc) {
    fs::create_directories((dir_ / name).parent_path());
    WriteEncoderOutputFile((dir_ / name).string(), enc);
    summary_.files.push_back(name);
  }

  SynthSummary summary() const { return summary_; }

 private:
  fs::path dir_;
  SynthSummary summary_;
};

std::string E(const std::string& prefix, size_t i) { return prefix + std::to_string(i); }

Tensor Gaussian(size_t rows, size_t cols, Rng& rng, double scale) {
  Tensor t(Shape{rows, cols});
  for (double& v : t.values()) v = scale * rng.Normal();
  return t;
}

// Rows [offset, offset + n) of the document tensors; attention restricted to
// the window and renormalised.
EncoderOutput Window(const Tensor& hidden, const Tensor& attention, size_t offset, size_t n) {
  const size_t d = hidden.cols();
  EncoderOutput enc;
  enc.offset = static_cast<uint32_t>(offset);
  enc.hidden = Tensor(Shape{n, d});
  enc.attention = Tensor(Shape{n, n});
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < d; ++k) enc.hidden.at(i, k) = hidden.at(offset + i, k);
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += attention.at(offset + i, offset + j);
    for (size_t j = 0; j < n; ++j) {
      enc.attention.at(i, j) = attention.at(offset + i, offset + j) / sum;
    }
  }
  return enc;
}

std::string Config(const std::string& comment, const std::vector<std::string>& lines) {
  std::string out = "# " + comment + "\n";
  for (const auto& l : lines) out += l + "\n";
  return out;
}

SynthSummary LinkPrediction(const SynthOptions& opt, FixtureWriter& w) {
  const size_t n = opt.entities;
  if (n < 10) throw Error("linkpred needs at least 10 entities");
  Rng rng(DeriveSeed(opt.seed, {0x6c70ULL}));
  constexpr size_t kBase = 3;
  std::vector<std::vector<size_t>> next(kBase, std::vector<size_t>(n));
  for (size_t r = 0; r < kBase; ++r) {
    for (size_t a = 0; a < n; ++a) {
      size_t b = rng.Below(n - 1);
      next[r][a] = b >= a ? b + 1 : b;
    }
  }
  // Composite relation k + 3 follows base rule[k].first then rule[k].second.
  const std::pair<size_t, size_t> rules[] = {{1, 2}, {2, 0}, {0, 1}};
  std::map<std::pair<size_t, size_t>, std::vector<size_t>> paths;
  for (size_t a = 0; a < n; ++a) {
    for (size_t k = 0; k < 3; ++k) {
      const size_t c = next[rules[k].second][next[rules[k].first][a]];
      if (c != a) paths[{a, c}].push_back(k);
    }
  }
  std::vector<std::pair<std::pair<size_t, size_t>, size_t>> queries;
  for (const auto& [pair, ks] : paths) {
    if (ks.size() == 1) queries.push_back({pair, ks[0]});
  }
  rng.Shuffle(queries);
  const size_t n_train = queries.size() * 6 / 10;
  const size_t n_dev = queries.size() / 5;

  std::vector<TripleText> triples;
  for (size_t a = 0; a < n; ++a) {
    for (size_t r = 0; r < kBase; ++r) triples.push_back({E("e", a), E("r", r), E("e", next[r][a])});
  }
  for (size_t q = 0; q < n_train; ++q) {
    const auto& [pair, k] = queries[q];
    triples.push_back({E("e", pair.first), E("r", k + 3), E("e", pair.second)});
  }
  w.Triples(triples);
  w.Relations({{"r3", "r1 then r2", "composition of r1 and r2"},
               {"r4", "r2 then r0", "composition of r2 and r0"},
               {"r5", "r0 then r1", "composition of r0 and r1"}});

  auto docs = [&](size_t begin, size_t end) {
    std::vector<DocumentRecord> out;
    for (size_t q = begin; q < end; ++q) {
      const auto& [pair, k] = queries[q];
      DocumentRecord d;
      d.id = E("q", q);
      const std::string s = E("e", pair.first), o = E("e", pair.second);
      d.entities = {{s, s}, {o, o}};
      d.pairs = {{s, o, {E("r", k + 3)}}};
      out.push_back(std::move(d));
    }
    return out;
  };
  w.Docs("train.docs", docs(0, n_train));
  w.Docs("dev.docs", docs(n_train, n_train + n_dev));
  w.Docs("test.docs", docs(n_train + n_dev, queries.size()));
  w.Text("train.cfg",
         Config("synthetic link prediction: graph module only",
                {"[data]", "kg = kg.tsv", "relations = relations.tsv", "train = train.docs",
                 "dev = dev.docs", "test = test.docs", "", "[model]", "task = supervised",
                 "text = off", "graph = nbf", "graph_hidden = 32", "head_hidden = 32", "",
                 "[sampler]", "remove_direct = true", "", "[train]", "loss = cross_entropy",
                 "batch_size = 8", "lr_graph = 0.005", "weight_decay = 0", "epochs = 200",
                 "patience = 40", "target_score = 1", "seed = " + std::to_string(opt.seed), "",
                 "[output]", "checkpoint = model.ckpt", "log = metrics.tsv",
                 "predictions = predictions.tsv"}));
  return w.summary();
}

SynthSummary DocumentLevel(const SynthOptions& opt, FixtureWriter& w) {
  if (opt.documents < 2 || opt.documents % 2 != 0) {
    throw Error("doclevel needs an even number of documents, at least 2");
  }
  if (opt.width < 4 || opt.width % 4 != 0) throw Error("doclevel width must be a multiple of 4");
  Rng rng(DeriveSeed(opt.seed, {0x646cULL}));
  constexpr size_t kEntities = 4;
  constexpr size_t kLength = 24;
  constexpr size_t kBackground = 24;
  const size_t d = opt.width;
  Tensor role_head = Gaussian(1, d, rng, 1.0);
  Tensor role_tail = Gaussian(1, d, rng, 1.0);

  std::vector<TripleText> triples;
  std::vector<DocumentRecord> docs;
  for (size_t g = 0; g < opt.documents / 2; ++g) {
    // Shared text side of the twin pair.
    Tensor hidden = Gaussian(kLength, d, rng, 1.0);
    Tensor attention(Shape{kLength, kLength});
    for (double& v : attention.values()) v = std::exp(rng.Normal());
    std::vector<bool> is_head(kEntities), is_tail(kEntities);
    std::vector<std::vector<size_t>> positions(kEntities);
    std::vector<size_t> free(kLength);
    for (size_t i = 0; i < kLength; ++i) free[i] = i;
    rng.Shuffle(free);
    size_t used = 0;
    for (size_t e = 0; e < kEntities; ++e) {
      is_head[e] = rng.Bernoulli(0.5);
      is_tail[e] = rng.Bernoulli(0.5);
      Tensor base = Gaussian(1, d, rng, 0.5);
      const size_t mentions = 1 + rng.Below(2);
      for (size_t m = 0; m < mentions; ++m) {
        const size_t p = free[used++];
        positions[e].push_back(p);
        for (size_t k = 0; k < d; ++k) {
          hidden.at(p, k) = base[k] + 0.1 * rng.Normal() + (is_head[e] ? role_head[k] : 0.0) +
                            (is_tail[e] ? role_tail[k] : 0.0);
        }
      }
    }
    const bool two_windows = g % 2 == 1;
    std::vector<std::string> windows;
    if (two_windows) {
      w.Export(E("exports/g", g) + "_w0.eout", Window(hidden, attention, 0, 16));
      w.Export(E("exports/g", g) + "_w1.eout", Window(hidden, attention, 10, kLength - 10));
      windows = {E("exports/g", g) + "_w0.eout", E("exports/g", g) + "_w1.eout"};
    } else {
      w.Export(E("exports/g", g) + "_w0.eout", Window(hidden, attention, 0, kLength));
      windows = {E("exports/g", g) + "_w0.eout"};
    }

    std::vector<std::vector<std::string>> graph_labels_prev;
    for (size_t twin = 0; twin < 2; ++twin) {
      const size_t doc = 2 * g + twin;
      DocumentRecord rec;
      rec.id = E("d", doc);
      rec.windows = windows;
      for (size_t e = 0; e < kEntities; ++e) {
        const std::string node = E("n", doc) + "_" + std::to_string(e);
        rec.entities.push_back({node, node});
        for (size_t p : positions[e]) {
          if (two_windows && p >= 16) {
            rec.mentions.push_back({node, 1, static_cast<uint32_t>(p - 10)});
          } else {
            rec.mentions.push_back({node, 0, static_cast<uint32_t>(p)});
          }
        }
        for (int k = 0; k < 2; ++k) {
          const std::string bg = E("bg", rng.Below(kBackground));
          if (rng.Bernoulli(0.5)) {
            triples.push_back({node, "kg_other", bg});
          } else {
            triples.push_back({bg, "kg_other", node});
          }
        }
      }
      // Graph-determined labels; redrawn until the twin differs.
      std::vector<std::vector<std::string>> graph_labels;
      std::vector<TripleText> doc_triples;
      do {
        graph_labels.assign(kEntities * kEntities, {});
        doc_triples.clear();
        for (size_t s = 0; s < kEntities; ++s) {
          for (size_t o = 0; o < kEntities; ++o) {
            if (s == o) continue;
            const std::string ns = E("n", doc) + "_" + std::to_string(s);
            const std::string no = E("n", doc) + "_" + std::to_string(o);
            if (rng.Bernoulli(0.25)) {
              doc_triples.push_back({ns, "kg_g0", no});
              graph_labels[s * kEntities + o].push_back("G0");
            }
            if (rng.Bernoulli(0.25)) {
              doc_triples.push_back({ns, "kg_g1", no});
              graph_labels[s * kEntities + o].push_back("G1");
            }
          }
        }
      } while (twin == 1 && graph_labels == graph_labels_prev);
      graph_labels_prev = graph_labels;
      triples.insert(triples.end(), doc_triples.begin(), doc_triples.end());
      for (size_t s = 0; s < kEntities; ++s) {
        for (size_t o = 0; o < kEntities; ++o) {
          if (s == o) continue;
          std::vector<std::string> labels = graph_labels[s * kEntities + o];
          if (is_head[s] && is_tail[o]) labels.insert(labels.begin(), "T0");
          rec.pairs.push_back({E("n", doc) + "_" + std::to_string(s),
                               E("n", doc) + "_" + std::to_string(o), labels});
        }
      }
      docs.push_back(std::move(rec));
    }
  }
  w.Triples(triples);
  w.Relations({{"T0", "text relation", "signalled by marker encodings"},
               {"G0", "graph relation zero", "follows kg_g0 edges"},
               {"G1", "graph relation one", "follows kg_g1 edges"}});
  w.Docs("train.docs", docs);
  w.Text("train.cfg",
         Config("synthetic document-level fusion: twins differ only in their graph",
                {"[data]", "kg = kg.tsv", "relations = relations.tsv", "train = train.docs",
                 "dev = train.docs", "test = train.docs", "", "[model]", "task = supervised",
                 "text = supervised", "graph = nbf", "block_size = 4", "graph_hidden = 16",
                 "head_hidden = 16", "", "[train]", "loss = hinge_abl", "batch_size = 4",
                 "lr_text = 0.01", "lr_graph = 0.01", "weight_decay = 0", "epochs = 300",
                 "patience = 300", "target_score = 1", "seed = " + std::to_string(opt.seed), "",
                 "[output]", "checkpoint = model.ckpt", "log = metrics.tsv",
                 "predictions = predictions.tsv"}));
  return w.summary();
}

SynthSummary ZeroShot(const SynthOptions& opt, FixtureWriter& w) {
  if (opt.examples_per_relation < 4) throw Error("zeroshot needs at least 4 examples per relation");
  if (opt.width < 2) throw Error("zeroshot width must be at least 2");
  Rng rng(DeriveSeed(opt.seed, {0x7a73ULL}));
  constexpr size_t kBase = 4;
  constexpr size_t kHubs = 8;
  const std::pair<size_t, size_t> signatures[] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}};
  constexpr size_t kTargets = std::size(signatures);
  std::set<std::pair<size_t, size_t>> distinct(std::begin(signatures), std::end(signatures));
  if (distinct.size() != kTargets) throw Error("zeroshot signatures must be distinct");

  std::vector<TripleText> triples;
  std::vector<DocumentRecord> docs;
  const size_t d = opt.width;
  Tensor match = Gaussian(1, d, rng, 1.0);
  for (size_t t = 0; t < kTargets; ++t) {
    for (size_t k = 0; k < opt.examples_per_relation; ++k) {
      const std::string tag = std::to_string(t) + "_" + std::to_string(k);
      const std::string s = "zs" + tag, m = "zm" + tag, o = "zo" + tag;
      triples.push_back({s, E("b", signatures[t].first), m});
      triples.push_back({m, E("b", signatures[t].second), o});
      triples.push_back({s, E("t", t), o});
      for (const std::string& end : {s, o}) {
        if (!rng.Bernoulli(0.5)) continue;
        const std::string hub = E("hub", rng.Below(kHubs));
        const std::string rel = E("b", rng.Below(kBase));
        if (rng.Bernoulli(0.5)) {
          triples.push_back({end, rel, hub});
        } else {
          triples.push_back({hub, rel, end});
        }
      }
      DocumentRecord rec;
      rec.id = "z" + tag;
      rec.entities = {{s, s}, {o, o}};
      rec.pairs = {{s, o, {E("t", t)}}};
      for (size_t r = 0; r < kTargets; ++r) {
        EncoderOutput enc;
        enc.hidden = Gaussian(3, d, rng, 1.0);
        if (r == t) {
          for (size_t c = 0; c < d; ++c) enc.hidden.at(0, c) += 0.5 * match[c];
        }
        enc.attention = Tensor(Shape{3, 3}, 1.0 / 3.0);
        const std::string path = "exports/z" + tag + "_t" + std::to_string(r) + ".eout";
        w.Export(path, enc);
        rec.relation_exports.emplace_back(E("t", r), path);
      }
      docs.push_back(std::move(rec));
    }
  }
  w.Triples(triples);
  std::vector<RelationMeta> relations;
  for (size_t t = 0; t < kTargets; ++t) {
    relations.push_back({E("t", t), E("target ", t),
                         "b" + std::to_string(signatures[t].first) + " followed by b" +
                             std::to_string(signatures[t].second)});
  }
  w.Relations(relations);
  w.Docs("train.docs", docs);
  w.Text("train.cfg",
         Config("synthetic zero-shot extraction: relations identified by path signatures",
                {"[data]", "kg = kg.tsv", "relations = relations.tsv", "train = train.docs", "",
                 "[model]", "task = zeroshot", "text = mc", "graph = ultra", "block_size = 4", "graph_hidden = 16",
                 "head_hidden = 16", "", "[sampler]", "remove_direct = true", "", "[train]",
                 "loss = cross_entropy", "batch_size = 16", "lr_text = 0.005", "lr_graph = 0.005",
                 "weight_decay = 0", "epochs = 60", "patience = 15",
                 "seed = " + std::to_string(opt.seed), "", "[zeroshot]", "test_relations = 2",
                 "resamples = 3", "split = 0", "", "[output]", "checkpoint = model.ckpt",
                 "log = metrics.tsv", "predictions = predictions.tsv"}));
  return w.summary();
}

}  // namespace

SynthSummary GenerateFixture(const SynthOptions& options, const std::filesystem::path& dir) {
  if (options.kind != "linkpred" && options.kind != "doclevel" && options.kind != "zeroshot") {
    throw Error("unknown fixture kind '" + options.kind + "' (linkpred, doclevel, zeroshot)");
  }
  FixtureWriter writer(dir);
  if (options.kind == "linkpred") return LinkPrediction(options, writer);
  if (options.kind == "doclevel") return DocumentLevel(options, writer);
  return ZeroShot(options, writer);
}

}  // namespace kgre
