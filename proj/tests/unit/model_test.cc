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

#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kgre/checkpoint.h"
#include "kgre/error.h"
#include "kgre/experiment.h"
#include "kgre/gradcheck.h"
#include "kgre/model.h"
#include "support/fixtures.h"

namespace kgre {
namespace {

using testing::FixtureConfig;
using testing::ReadFile;
using testing::TempDir;

bool BitEqual(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void ZeroParameter(RelationExtractionModel& model, const std::string& name) {
  Parameter* p = model.parameters().Find(name);
  ASSERT_NE(p, nullptr) << name;
  for (double& v : p->value.values()) v = 0.0;
}

TEST(Model, BetaZeroDecisionsMatchTextOnlyPath) {
  TempDir dir;
  Experiment ex(FixtureConfig("doclevel", dir.path(), {"model.beta=0", "train.epochs=3"}));
  auto model = ex.BuildModel();
  ex.Train(*model, nullptr);
  Split split = ex.MakeSplit(*model, "test");
  ASSERT_FALSE(split.docs.empty());
  size_t decisions = 0;
  for (const PreparedDocument& doc : split.docs) {
    Tape a, b;
    DocumentLogits fused = model->Forward(a, doc, split.candidates);
    DocumentLogits text = model->ForwardTextOnly(b, doc, split.candidates);
    ASSERT_EQ(fused.fused.size(), text.fused.size());
    for (size_t i = 0; i < fused.fused.size(); ++i) {
      EXPECT_TRUE(BitEqual(fused.fused[i].value(), text.fused[i].value()));
    }
    auto da = model->Decide(fused, split.candidates);
    auto db = model->Decide(text, split.candidates);
    ASSERT_EQ(da.size(), db.size());
    for (size_t i = 0; i < da.size(); ++i) {
      EXPECT_EQ(da[i].pair, db[i].pair);
      EXPECT_EQ(da[i].relation, db[i].relation);
      EXPECT_EQ(da[i].score, db[i].score);
    }
    decisions += da.size();
  }
  SUCCEED() << decisions << " decisions compared";
}

TEST(Model, PostPredictionIsNoOpWhenTextDecidesNothing) {
  TempDir dir;
  Experiment plain(FixtureConfig("doclevel", dir.path()));
  ExperimentConfig post_cfg = plain.config();
  post_cfg.model.post_prediction = true;
  Experiment post(post_cfg);
  auto a = plain.BuildModel();
  auto b = post.BuildModel();
  ASSERT_EQ(a->parameters().size(), b->parameters().size());
  // All text logits become zero, so no slot beats the threshold.
  ZeroParameter(*a, "text.bilinear");
  ZeroParameter(*b, "text.bilinear");
  Split sa = plain.MakeSplit(*a, "test");
  Split sb = post.MakeSplit(*b, "test");
  ASSERT_EQ(sa.docs.size(), sb.docs.size());
  for (size_t d = 0; d < sa.docs.size(); ++d) {
    Tape ta, tb;
    DocumentLogits la = a->Forward(ta, sa.docs[d], sa.candidates);
    DocumentLogits lb = b->Forward(tb, sb.docs[d], sb.candidates);
    EXPECT_EQ(lb.added_edges, 0u);
    ASSERT_EQ(la.fused.size(), lb.fused.size());
    for (size_t i = 0; i < la.fused.size(); ++i) {
      EXPECT_TRUE(BitEqual(la.fused[i].value(), lb.fused[i].value()));
    }
  }
}

TEST(Model, PostPredictionAddsEdgesOnceTextFires) {
  TempDir dir;
  ExperimentConfig cfg = FixtureConfig("doclevel", dir.path());
  cfg.model.post_prediction = true;
  Experiment ex(cfg);
  auto model = ex.BuildModel();
  Parameter* bilinear = model->parameters().Find("text.bilinear");
  ASSERT_NE(bilinear, nullptr);
  Rng rng(9);
  for (double& v : bilinear->value.values()) v = 5.0 * rng.Normal();
  Split split = ex.MakeSplit(*model, "test");
  size_t added = 0;
  for (const PreparedDocument& doc : split.docs) {
    Tape tape;
    added += model->Forward(tape, doc, split.candidates).added_edges;
  }
  EXPECT_GT(added, 0u);
  EXPECT_EQ(added % 2, 0u);
}

TEST(Model, PostPredictionRejectsSingleLabelLoss) {
  TempDir dir;
  ExperimentConfig cfg =
      FixtureConfig("doclevel", dir.path(), {"model.post_prediction=true", "train.loss=cross_entropy"});
  Experiment ex(cfg);
  EXPECT_THROW(ex.BuildModel(), Error);
}

TEST(Model, LossGradientsMatchFiniteDifferences) {
  TempDir dir;
  Experiment ex(FixtureConfig("doclevel", dir.path(),
                              {"model.graph_hidden=4", "model.head_hidden=4", "model.graph_layers=2"}));
  auto model = ex.BuildModel();
  Split split = ex.MakeSplit(*model, "train");
  const PreparedDocument& doc = split.docs.front();
  // Zero-initialised biases put ReLUs exactly on their kink; move off it.
  Rng noise(3);
  std::vector<Parameter*> params;
  for (size_t i = 0; i < model->parameters().size(); ++i) {
    Parameter& p = model->parameters()[i];
    for (double& v : p.value.values()) v += 0.2 * noise.Normal();
    if (p.name.rfind("text.mc.", 0) != 0) params.push_back(&p);
  }
  auto fn = [&](Tape& tape) {
    return model->Loss(model->Forward(tape, doc, split.candidates), doc, split.candidates);
  };
  for (Parameter* p : params) {
    Parameter* one[] = {p};
    EXPECT_LT(CheckParameterGradients(fn, one), 1e-4) << p->name;
  }
}

TEST(Training, RepeatedRunsAreBitIdentical) {
  std::string logs[2];
  std::vector<Tensor> params[2];
  for (int run = 0; run < 2; ++run) {
    TempDir dir;
    Experiment ex(FixtureConfig("doclevel", dir.path(), {"train.epochs=6", "train.target_score=0"}));
    auto model = ex.BuildModel();
    std::ostringstream out;
    ex.Train(*model, &out);
    logs[run] = out.str();
    params[run] = model->parameters().Snapshot();
    EXPECT_EQ(ReadFile(dir / "metrics.tsv"), logs[run]);
  }
  EXPECT_EQ(logs[0], logs[1]);
  ASSERT_EQ(params[0].size(), params[1].size());
  for (size_t i = 0; i < params[0].size(); ++i) EXPECT_TRUE(BitEqual(params[0][i], params[1][i]));
}

TEST(Training, ThreadCountDoesNotChangeResults) {
  std::string logs[2];
  const char* threads[] = {"train.threads=1", "train.threads=3"};
  for (int run = 0; run < 2; ++run) {
    TempDir dir;
    Experiment ex(FixtureConfig("doclevel", dir.path(), {"train.epochs=4", threads[run]}));
    auto model = ex.BuildModel();
    std::ostringstream out;
    ex.Train(*model, &out);
    logs[run] = out.str();
  }
  EXPECT_EQ(logs[0], logs[1]);
}

TEST(Training, DifferentSeedsDiverge) {
  std::string logs[2];
  const char* seeds[] = {"train.seed=1", "train.seed=2"};
  for (int run = 0; run < 2; ++run) {
    TempDir dir;
    Experiment ex(FixtureConfig("doclevel", dir.path(), {"train.epochs=3", seeds[run]}));
    auto model = ex.BuildModel();
    std::ostringstream out;
    ex.Train(*model, &out);
    logs[run] = out.str();
  }
  EXPECT_NE(logs[0], logs[1]);
}

TEST(Training, LogHasOneLinePerEpoch) {
  TempDir dir;
  Experiment ex(FixtureConfig("doclevel", dir.path(), {"train.epochs=4", "train.target_score=0"}));
  auto model = ex.BuildModel();
  std::ostringstream out;
  TrainResult r = ex.Train(*model, &out);
  std::istringstream in(out.str());
  std::string line;
  size_t lines = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line, FormatEpochLine(r.history[lines]));
    ++lines;
  }
  EXPECT_EQ(lines, r.history.size());
  EXPECT_GE(r.best_epoch, 1u);
  EXPECT_EQ(r.best_score, r.history[r.best_epoch - 1].f1);
}

TEST(Checkpoint, RoundTripThroughExperiment) {
  TempDir dir;
  Experiment ex(FixtureConfig("doclevel", dir.path(), {"train.epochs=2"}));
  auto trained = ex.BuildModel();
  ex.Train(*trained, nullptr);
  auto loaded = ex.BuildModel();
  ZeroParameter(*loaded, "text.bilinear");
  ex.LoadCheckpoint(*loaded);
  for (size_t i = 0; i < trained->parameters().size(); ++i) {
    const Tensor& a = trained->parameters()[i].value;
    const Tensor& b = loaded->parameters()[i].value;
    ASSERT_EQ(a.shape(), b.shape());
    for (size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(b[k], static_cast<double>(static_cast<float>(a[k])));
    }
  }
}

TEST(Checkpoint, StreamRoundTripAndVersion) {
  ParameterStore store;
  store.Add("a", Tensor::Matrix(2, 2, {1, 2, 3, 4.5}), kTextGroup);
  store.Add("b", Tensor::Vector({-0.25}), kGraphGroup);
  Checkpoint ckpt = MakeCheckpoint(store, {{"model.task", "supervised"}});
  std::stringstream buf;
  WriteCheckpoint(buf, ckpt);
  EXPECT_EQ(buf.str().substr(0, 4), "KGCK");
  Checkpoint back = ReadCheckpoint(buf);
  ASSERT_NE(back.Find("model.task"), nullptr);
  EXPECT_EQ(*back.Find("model.task"), "supervised");
  EXPECT_EQ(back.Find("missing"), nullptr);
  ParameterStore other;
  other.Add("a", Tensor(Shape{2, 2}), kTextGroup);
  other.Add("b", Tensor(Shape{1}), kGraphGroup);
  LoadParameters(other, back);
  EXPECT_EQ(other[0].value, store[0].value);
  EXPECT_EQ(other[1].value, store[1].value);

  std::string bytes = buf.str();
  bytes[4] = 99;
  std::istringstream bad(bytes);
  EXPECT_THROW(ReadCheckpoint(bad), Error);
  std::istringstream truncated(buf.str().substr(0, buf.str().size() - 3));
  EXPECT_THROW(ReadCheckpoint(truncated), Error);
}

TEST(Checkpoint, LoadParametersRejectsMismatch) {
  ParameterStore store;
  store.Add("a", Tensor(Shape{3}), kTextGroup);
  Checkpoint ckpt = MakeCheckpoint(store, {});
  ParameterStore wrong_shape;
  wrong_shape.Add("a", Tensor(Shape{4}), kTextGroup);
  EXPECT_THROW(LoadParameters(wrong_shape, ckpt), Error);
  ParameterStore wrong_name;
  wrong_name.Add("b", Tensor(Shape{3}), kTextGroup);
  EXPECT_THROW(LoadParameters(wrong_name, ckpt), Error);
  ParameterStore extra;
  extra.Add("a", Tensor(Shape{3}), kTextGroup);
  extra.Add("c", Tensor(Shape{1}), kTextGroup);
  EXPECT_THROW(LoadParameters(extra, ckpt), Error);
}

TEST(Checkpoint, SettingsMismatchIsReported) {
  TempDir dir;
  Experiment ex(FixtureConfig("doclevel", dir.path(), {"train.epochs=1"}));
  auto model = ex.BuildModel();
  ex.Train(*model, nullptr);
  ExperimentConfig changed = ex.config();
  changed.model.graph_hidden = 8;
  Experiment other(changed);
  auto m = other.BuildModel();
  try {
    other.LoadCheckpoint(*m);
    FAIL() << "expected a settings mismatch";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("model.graph_hidden"), std::string::npos) << e.what();
  }
  // Fusion weights and post-prediction may differ at inference time.
  ExperimentConfig inference = ex.config();
  inference.model.fusion.beta = 0.0;
  inference.model.post_prediction = true;
  Experiment third(inference);
  auto m3 = third.BuildModel();
  EXPECT_NO_THROW(third.LoadCheckpoint(*m3));
}

}  // namespace
}  // namespace kgre
