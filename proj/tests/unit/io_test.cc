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

#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kgre/config.h"
#include "kgre/document.h"
#include "kgre/encoder_export.h"
#include "kgre/error.h"
#include "kgre/experiment.h"
#include "kgre/synth.h"
#include "support/fixtures.h"

namespace kgre {
namespace {

using testing::GraphFromText;
using testing::ReadFile;
using testing::TempDir;

TEST(Config, SectionsCommentsAndPaths) {
  std::istringstream in(
      "# top\n"
      "seed = 3\n"
      "[data]\n"
      "  kg = graph/kg.tsv  \n"
      "abs = /tmp/x\n"
      "[model]\n"
      "beta = 0.5\n"
      "post = yes\n");
  Config c = Config::Parse(in, "/base");
  EXPECT_EQ(c.GetInt("seed", 0), 3);
  EXPECT_EQ(c.GetPath("data.kg"), std::filesystem::path("/base/graph/kg.tsv"));
  EXPECT_EQ(c.GetPath("data.abs"), std::filesystem::path("/tmp/x"));
  EXPECT_EQ(c.GetPath("data.missing"), std::filesystem::path());
  EXPECT_EQ(c.GetDouble("model.beta", 1.0), 0.5);
  EXPECT_TRUE(c.GetBool("model.post", false));
  EXPECT_EQ(c.GetString("model.none", "fb"), "fb");
}

TEST(Config, ParseErrorsCarryLineNumbers) {
  const char* bad[] = {"a = 1\n[open\n", "a = 1\nnovalue\n", "a = 1\na = 2\n", "bad key = 1\n"};
  const size_t lines[] = {2, 2, 2, 1};
  for (size_t i = 0; i < 4; ++i) {
    std::istringstream in(bad[i]);
    try {
      Config::Parse(in);
      FAIL() << bad[i];
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), lines[i]) << bad[i];
    }
  }
}

TEST(Config, TypedGettersRejectGarbage) {
  Config c;
  c.SetAssignment("x = 1.5");
  c.SetAssignment("b=maybe");
  EXPECT_THROW(c.GetInt("x", 0), Error);
  EXPECT_THROW(c.GetBool("b", false), Error);
  EXPECT_THROW(c.SetAssignment("no_equals"), Error);
  c.Set("u", "-1");
  EXPECT_THROW(c.GetUnsigned("u", 0), Error);
}

TEST(Config, UnknownKeysAreRejected) {
  Config c;
  c.Set("data.relations", "r.tsv");
  c.Set("model.betta", "0");
  try {
    ParseExperimentConfig(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("model.betta"), std::string::npos);
  }
}

TEST(Config, ExperimentDefaults) {
  Config c;
  ExperimentConfig e = ParseExperimentConfig(c);
  EXPECT_EQ(e.training.batch_size, 8u);
  EXPECT_EQ(e.training.lr_text, 3e-5);
  EXPECT_EQ(e.training.lr_graph, 1e-4);
  EXPECT_EQ(e.model.sampler.hop_cap, 100u);
  EXPECT_EQ(e.model.sampler.hops, 2u);
  EXPECT_EQ(e.model.fusion.alpha, 1.0);
  EXPECT_EQ(e.model.fusion.beta, 1.0);
  EXPECT_FALSE(e.model.post_prediction);
  EXPECT_EQ(e.support.samples_per_relation, 1000u);
  EXPECT_EQ(e.support.keep_threshold, 0.10);

  Config z;
  z.Set("model.task", "zeroshot");
  ExperimentConfig ez = ParseExperimentConfig(z);
  EXPECT_EQ(ez.training.batch_size, 16u);
  EXPECT_EQ(ez.model.loss, LossKind::kCrossEntropy);
  EXPECT_EQ(ez.model.text, TextMode::kMultipleChoice);
  EXPECT_EQ(ez.model.graph, GraphMode::kUltra);
  EXPECT_TRUE(ez.model.remove_direct);
  EXPECT_EQ(ez.training.metric, "macro");
}

TEST(Config, ExperimentValueErrors) {
  const char* bad[][2] = {{"model.task", "fewshot"},   {"model.text", "bert"},
                          {"model.graph", "gcn"},      {"model.beta", "inf"},
                          {"train.batch_size", "0"},   {"train.loss", "hinge"},
                          {"zeroshot.split", "5"},     {"zeroshot.validation_fraction", "1"}};
  for (const auto& kv : bad) {
    Config c;
    c.Set(kv[0], kv[1]);
    EXPECT_THROW(ParseExperimentConfig(c), Error) << kv[0] << "=" << kv[1];
  }
}

EncoderOutput SmallExport() {
  EncoderOutput enc;
  enc.offset = 7;
  enc.hidden = Tensor::Matrix(3, 2, {0.5, -1, 2, 0.25, 0, 3});
  enc.attention = Tensor::Matrix(3, 3, {0.5, 0.5, 0, 0, 1, 0, 0.25, 0.25, 0.5});
  return enc;
}

TEST(EncoderExport, RoundTrip) {
  std::stringstream buf;
  WriteEncoderOutput(buf, SmallExport());
  EXPECT_EQ(buf.str().substr(0, 4), "EOUT");
  EXPECT_EQ(buf.str().size(), 4 + 4 * 4 + 4 * (6 + 9));
  EncoderOutput back = ReadEncoderOutput(buf);
  EXPECT_EQ(back.offset, 7u);
  EXPECT_EQ(back.hidden, SmallExport().hidden);  // values are exact in float32
  EXPECT_EQ(back.attention, SmallExport().attention);
  EXPECT_EQ(back.tokens(), 3u);
  EXPECT_EQ(back.width(), 2u);
}

TEST(EncoderExport, RejectsCorruptInput) {
  std::stringstream buf;
  WriteEncoderOutput(buf, SmallExport());
  const std::string bytes = buf.str();
  std::string magic = bytes;
  magic[0] = 'X';
  std::istringstream a(magic);
  EXPECT_THROW(ReadEncoderOutput(a), Error);
  std::istringstream b(bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(ReadEncoderOutput(b), Error);
  EncoderOutput negative = SmallExport();
  negative.attention[1] = -0.1;
  EXPECT_THROW(ValidateEncoderOutput(negative), Error);
  EncoderOutput shape = SmallExport();
  shape.attention = Tensor(Shape{2, 2});
  EXPECT_THROW(ValidateEncoderOutput(shape), Error);
  EXPECT_THROW(ValidateEncoderOutput(EncoderOutput{}), Error);
}

const char* kDocText =
    "# comment\n"
    "doc d1\n"
    "window w.eout\n"
    "entity Alice e0\n"
    "entity Bob -\n"
    "mention Alice 0 0\n"
    "mention Bob 0 2\n"
    "pair Alice Bob knows,likes\n"
    "pair Bob Alice -\n"
    "end\n";

TEST(Documents, ParseWriteRoundTrip) {
  std::istringstream in(kDocText);
  auto docs = ParseDocumentFile(in);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].entities[1].link, "");
  EXPECT_EQ(docs[0].pairs[0].relations, (std::vector<std::string>{"knows", "likes"}));
  std::ostringstream out;
  WriteDocumentFile(out, docs);
  std::istringstream again(out.str());
  auto docs2 = ParseDocumentFile(again);
  std::ostringstream out2;
  WriteDocumentFile(out2, docs2);
  EXPECT_EQ(out.str(), out2.str());
}

TEST(Documents, ParseErrors) {
  const char* bad[] = {"entity a b\n", "doc d\ndoc e\n", "doc d\nmention a x 0\nend\n",
                       "doc d\nwhat\nend\n", "doc d\n"};
  const size_t lines[] = {1, 2, 2, 2, 1};
  for (size_t i = 0; i < 5; ++i) {
    std::istringstream in(bad[i]);
    try {
      ParseDocumentFile(in);
      FAIL() << bad[i];
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), lines[i]) << bad[i];
    }
  }
}

TEST(Documents, ResolveLinksAndValidate) {
  TempDir dir;
  WriteEncoderOutputFile((dir / "w.eout").string(), SmallExport());
  std::ofstream(dir / "d.docs") << kDocText;
  KnowledgeGraph g = GraphFromText("e0\tknows\te1\n");
  std::vector<RelationMeta> rels{{"knows", "knows", ""}, {"likes", "likes", ""}};
  auto docs = LoadDocuments(dir / "d.docs", g, rels);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].links[0], g.entities().Find("e0"));
  EXPECT_FALSE(docs[0].links[1].has_value());
  EXPECT_EQ(docs[0].pairs[0].relations, (std::vector<uint32_t>{0, 1}));
  EXPECT_EQ(docs[0].mentions[1].marker, 2u);

  std::ofstream(dir / "bad.docs") << "doc x\nwindow w.eout\nentity a -\nmention a 0 3\nend\n";
  EXPECT_THROW(LoadDocuments(dir / "bad.docs", g, rels), Error);
  std::ofstream(dir / "rel.docs") << "doc x\nentity a -\npair a a unknown\nend\n";
  EXPECT_THROW(LoadDocuments(dir / "rel.docs", g, rels), Error);
}

std::map<std::string, std::string> FixtureBytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      out[std::filesystem::relative(e.path(), dir).string()] = ReadFile(e.path());
    }
  }
  return out;
}

class SynthTest : public ::testing::TestWithParam<const char*> {};

TEST_P(SynthTest, SameSeedSameBytes) {
  TempDir a, b, c;
  SynthOptions o;
  o.kind = GetParam();
  o.seed = 5;
  GenerateFixture(o, a.path());
  GenerateFixture(o, b.path());
  EXPECT_EQ(FixtureBytes(a.path()), FixtureBytes(b.path()));
  o.seed = 6;
  GenerateFixture(o, c.path());
  EXPECT_NE(FixtureBytes(a.path()), FixtureBytes(c.path()));
}

TEST_P(SynthTest, LoadsAsExperiment) {
  TempDir dir;
  Experiment ex(testing::FixtureConfig(GetParam(), dir.path()));
  auto model = ex.BuildModel();
  EXPECT_FALSE(ex.MakeSplit(*model, "train").docs.empty());
  EXPECT_FALSE(ex.MakeSplit(*model, "test").docs.empty());
}

INSTANTIATE_TEST_SUITE_P(Kinds, SynthTest, ::testing::Values("linkpred", "doclevel", "zeroshot"));

TEST(Synth, UnknownKindThrows) {
  TempDir dir;
  SynthOptions o;
  o.kind = "bogus";
  EXPECT_THROW(GenerateFixture(o, dir.path()), Error);
}

// Composition rules read back from the relation descriptions.
std::map<std::string, std::pair<std::string, std::string>> Rules(const std::filesystem::path& p,
                                                                 const std::string& pattern) {
  std::map<std::string, std::pair<std::string, std::string>> out;
  const std::regex re(pattern);
  for (const RelationMeta& r : LoadRelationMetaFile(p.string())) {
    std::smatch m;
    if (std::regex_search(r.description, m, re)) out[r.id] = {m[1], m[2]};
    if (std::regex_search(r.label, m, re)) out[r.id] = {m[1], m[2]};
  }
  return out;
}

bool HasPath(const KnowledgeGraph& g, EntityId s, const std::string& r1, const std::string& r2,
             EntityId o) {
  const auto a = g.relations().Find(r1), b = g.relations().Find(r2);
  if (!a || !b) return false;
  for (uint32_t e : g.OutEdges(s)) {
    const Triple& t = g.triples()[e];
    if (t.relation == *a && g.Contains({t.object, *b, o})) return true;
  }
  return false;
}

TEST(Synth, LinkPredictionQueriesHavePlantedPathsAndNoDirectEdge) {
  TempDir dir;
  SynthOptions o;
  o.kind = "linkpred";
  GenerateFixture(o, dir.path());
  const KnowledgeGraph g = KnowledgeGraph::LoadFile((dir / "kg.tsv").string());
  const auto rules = Rules(dir / "relations.tsv", R"((r\d+) then (r\d+))");
  ASSERT_EQ(rules.size(), 3u);
  for (const char* split : {"dev.docs", "test.docs"}) {
    std::ifstream in(dir / split);
    const auto docs = ParseDocumentFile(in);
    ASSERT_FALSE(docs.empty());
    for (const auto& d : docs) {
      for (const auto& p : d.pairs) {
        ASSERT_EQ(p.relations.size(), 1u);
        const EntityId s = *g.entities().Find(p.subject), ob = *g.entities().Find(p.object);
        const auto& [r1, r2] = rules.at(p.relations[0]);
        EXPECT_TRUE(HasPath(g, s, r1, r2, ob)) << d.id;
        const auto direct = g.relations().Find(p.relations[0]);
        if (direct) {
          EXPECT_FALSE(g.Contains({s, *direct, ob})) << d.id;
        }
      }
    }
  }
}

TEST(Synth, ZeroShotTargetsHaveDistinctPathSignatures) {
  TempDir dir;
  SynthOptions o;
  o.kind = "zeroshot";
  GenerateFixture(o, dir.path());
  const KnowledgeGraph g = KnowledgeGraph::LoadFile((dir / "kg.tsv").string());
  const auto rules = Rules(dir / "relations.tsv", R"((b\d+) followed by (b\d+))");
  ASSERT_EQ(rules.size(), 6u);
  std::set<std::pair<std::string, std::string>> signatures;
  for (const auto& [id, sig] : rules) signatures.insert(sig);
  EXPECT_EQ(signatures.size(), rules.size());
  std::ifstream in(dir / "train.docs");
  const auto docs = ParseDocumentFile(in);
  EXPECT_EQ(docs.size(), 6 * o.examples_per_relation);
  for (const auto& d : docs) {
    ASSERT_EQ(d.pairs.size(), 1u);
    EXPECT_EQ(d.relation_exports.size(), 6u);
    const auto& p = d.pairs[0];
    const auto& [r1, r2] = rules.at(p.relations.at(0));
    EXPECT_TRUE(HasPath(g, *g.entities().Find(p.subject), r1, r2, *g.entities().Find(p.object)))
        << d.id;
  }
}

}  // namespace
}  // namespace kgre
