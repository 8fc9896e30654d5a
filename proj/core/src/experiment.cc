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

#include "kgre/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <streambuf>

#include "kgre/checkpoint.h"
#include "kgre/error.h"
#include "kgre/eval.h"
#include "kgre/rng.h"

namespace kgre {
namespace {

constexpr std::string_view kKeys[] = {
    "data.kg", "data.relations", "data.train", "data.dev", "data.test",
    "model.task", "model.text", "model.graph", "model.alpha", "model.beta",
    "model.block_size", "model.graph_hidden", "model.graph_layers", "model.head_hidden",
    "model.share_relation_embeddings", "model.post_prediction",
    "sampler.hop_cap", "sampler.hops", "sampler.remove_direct",
    "train.loss", "train.batch_size", "train.lr_text", "train.lr_graph",
    "train.weight_decay", "train.epochs", "train.patience", "train.metric",
    "train.max_grad_norm", "train.seed", "train.target_score", "train.threads",
    "zeroshot.test_relations", "zeroshot.resamples", "zeroshot.split",
    "zeroshot.validation_fraction", "zeroshot.support_samples", "zeroshot.support_threshold",
    "output.checkpoint", "output.log", "output.predictions",
};

// Writes to two streams at once.
class TeeBuf : public std::streambuf {
 public:
  TeeBuf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

 protected:
  int overflow(int c) override {
    if (c == EOF) return !EOF;
    const int ra = a_ ? a_->sputc(static_cast<char>(c)) : c;
    const int rb = b_ ? b_->sputc(static_cast<char>(c)) : c;
    return ra == EOF || rb == EOF ? EOF : c;
  }
  int sync() override {
    const int ra = a_ ? a_->pubsync() : 0;
    const int rb = b_ ? b_->pubsync() : 0;
    return ra == 0 && rb == 0 ? 0 : -1;
  }

 private:
  std::streambuf* a_;
  std::streambuf* b_;
};

size_t Positive(const Config& c, const std::string& key, size_t fallback) {
  const int64_t v = c.GetInt(key, static_cast<int64_t>(fallback));
  if (v <= 0) throw Error("config key " + key + " must be positive");
  return static_cast<size_t>(v);
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* TaskName(Task t) { return t == Task::kZeroShot ? "zeroshot" : "supervised"; }
const char* TextName(TextMode t) {
  return t == TextMode::kOff ? "off" : t == TextMode::kSupervised ? "supervised" : "mc";
}
const char* GraphName(GraphMode g) {
  return g == GraphMode::kOff ? "off" : g == GraphMode::kNbf ? "nbf" : "ultra";
}

}  // namespace

std::span<const std::string_view> KnownConfigKeys() { return kKeys; }

ExperimentConfig ParseExperimentConfig(const Config& c) {
  c.CheckKeys(kKeys);
  ExperimentConfig e;
  e.kg = c.GetPath("data.kg");
  e.relations = c.GetPath("data.relations");
  e.train = c.GetPath("data.train");
  e.dev = c.GetPath("data.dev");
  e.test = c.GetPath("data.test");

  ModelConfig& m = e.model;
  const std::string task = c.GetString("model.task", "supervised");
  if (task == "supervised") {
    m.task = Task::kSupervised;
  } else if (task == "zeroshot") {
    m.task = Task::kZeroShot;
  } else {
    throw Error("model.task must be supervised or zeroshot, got " + task);
  }
  const bool zero_shot = m.task == Task::kZeroShot;
  const std::string text = c.GetString("model.text", zero_shot ? "mc" : "supervised");
  if (text == "off") {
    m.text = TextMode::kOff;
  } else if (text == "supervised") {
    m.text = TextMode::kSupervised;
  } else if (text == "mc") {
    m.text = TextMode::kMultipleChoice;
  } else {
    throw Error("model.text must be off, supervised or mc, got " + text);
  }
  const std::string graph = c.GetString("model.graph", zero_shot ? "ultra" : "nbf");
  if (graph == "off") {
    m.graph = GraphMode::kOff;
  } else if (graph == "nbf") {
    m.graph = GraphMode::kNbf;
  } else if (graph == "ultra") {
    m.graph = GraphMode::kUltra;
  } else {
    throw Error("model.graph must be off, nbf or ultra, got " + graph);
  }
  m.fusion.alpha = c.GetDouble("model.alpha", 1.0);
  m.fusion.beta = c.GetDouble("model.beta", 1.0);
  if (!std::isfinite(m.fusion.alpha) || !std::isfinite(m.fusion.beta)) {
    throw Error("fusion weights must be finite");
  }
  m.block_size = Positive(c, "model.block_size", 64);
  m.graph_hidden = Positive(c, "model.graph_hidden", 32);
  m.graph_layers = Positive(c, "model.graph_layers", 4);
  m.head_hidden = Positive(c, "model.head_hidden", 32);
  m.share_relation_embeddings = c.GetBool("model.share_relation_embeddings", false);
  m.post_prediction = c.GetBool("model.post_prediction", false);
  m.sampler.hop_cap = static_cast<uint32_t>(Positive(c, "sampler.hop_cap", 100));
  m.sampler.hops = static_cast<uint32_t>(c.GetUnsigned("sampler.hops", 2));
  m.remove_direct = c.GetBool("sampler.remove_direct", zero_shot);
  m.loss = ParseLossKind(c.GetString("train.loss", zero_shot ? "cross_entropy" : "hinge_abl"));

  TrainConfig& t = e.training;
  t.batch_size = Positive(c, "train.batch_size", zero_shot ? 16 : 8);
  t.lr_text = c.GetDouble("train.lr_text", 3e-5);
  t.lr_graph = c.GetDouble("train.lr_graph", 1e-4);
  t.weight_decay = c.GetDouble("train.weight_decay", 0.01);
  t.epochs = Positive(c, "train.epochs", 100);
  t.patience = Positive(c, "train.patience", 10);
  t.metric = c.GetString("train.metric", zero_shot ? "macro" : "micro");
  t.max_grad_norm = c.GetDouble("train.max_grad_norm", 0.0);
  t.target_score = c.GetDouble("train.target_score", 0.0);
  t.threads = Positive(c, "train.threads", 1);
  e.seed = c.GetUnsigned("train.seed", 0);
  t.seed = e.seed;

  e.test_relations = Positive(c, "zeroshot.test_relations", 5);
  e.resamples = Positive(c, "zeroshot.resamples", 5);
  e.split_index = c.GetUnsigned("zeroshot.split", 0);
  if (e.split_index >= e.resamples) throw Error("zeroshot.split must be below zeroshot.resamples");
  e.validation_fraction = c.GetDouble("zeroshot.validation_fraction", 0.2);
  if (!(e.validation_fraction > 0.0 && e.validation_fraction < 1.0)) {
    throw Error("zeroshot.validation_fraction must lie in (0, 1)");
  }
  e.support.samples_per_relation =
      static_cast<uint32_t>(Positive(c, "zeroshot.support_samples", 1000));
  e.support.keep_threshold = c.GetDouble("zeroshot.support_threshold", 0.10);
  e.support.neighborhood = m.sampler;

  e.checkpoint = c.GetPath("output.checkpoint");
  e.log = c.GetPath("output.log");
  e.predictions = c.GetPath("output.predictions");
  return e;
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
  if (!config_.kg.empty()) graph_ = KnowledgeGraph::LoadFile(config_.kg.string());
  graph_ = graph_.WithInverseRelations();
  if (config_.relations.empty()) throw Error("data.relations is required");
  relations_ = LoadRelationMetaFile(config_.relations.string());
  for (const RelationMeta& r : relations_) relation_ids_.push_back(r.id);
  if (!config_.train.empty()) train_ = LoadDocuments(config_.train, graph_, relations_);
  if (!config_.dev.empty()) dev_ = LoadDocuments(config_.dev, graph_, relations_);
  if (!config_.test.empty()) test_ = LoadDocuments(config_.test, graph_, relations_);
  if (config_.model.task == Task::kZeroShot) BuildZeroShotSplit();
  if (config_.model.graph == GraphMode::kUltra) {
    std::vector<RelationId> ids;
    for (const RelationMeta& r : relations_) {
      auto id = graph_.relations().Find(r.id);
      if (!id) throw Error("relation " + r.id + " does not occur in the knowledge graph");
      ids.push_back(*id);
    }
    relation_graph_ =
        FilterSupportGraph(graph_, ids, DeriveSeed(config_.seed, {0x7267ULL}), config_.support);
  }
}

void Experiment::BuildZeroShotSplit() {
  for (auto* part : {&train_, &dev_, &test_}) {
    for (DocumentInstance& d : *part) pooled_.push_back(std::move(d));
    part->clear();
  }
  std::vector<uint32_t> example_relations;
  for (const DocumentInstance& d : pooled_) {
    if (d.pairs.size() != 1 || d.pairs[0].relations.size() != 1) {
      throw Error(d.id + ": zero-shot examples need exactly one pair with one relation");
    }
    example_relations.push_back(d.pairs[0].relations[0]);
  }
  auto splits = ZeroShotSplits(example_relations, relations_.size(), config_.test_relations,
                               config_.resamples, config_.seed);
  zero_shot_ = splits.at(config_.split_index);
  std::vector<size_t> held = zero_shot_.train_examples;
  Rng rng(DeriveSeed(zero_shot_.seed, {0x76616cULL}));
  rng.Shuffle(held);
  const size_t n_dev = std::max<size_t>(
      1, static_cast<size_t>(std::ceil(config_.validation_fraction * held.size())));
  if (n_dev >= held.size()) throw Error("too few zero-shot training examples to hold out");
  zs_dev_.assign(held.begin(), held.begin() + n_dev);
  zs_train_.assign(held.begin() + n_dev, held.end());
  std::sort(zs_dev_.begin(), zs_dev_.end());
  std::sort(zs_train_.begin(), zs_train_.end());
}

std::unique_ptr<RelationExtractionModel> Experiment::BuildModel() const {
  ModelShape shape;
  shape.relations = relations_.size();
  shape.graph_relation_types = graph_.relation_count();
  for (const auto* part : {&train_, &dev_, &test_, &pooled_}) {
    for (const DocumentInstance& d : *part) {
      if (shape.encoder_width == 0 && !d.windows.empty()) shape.encoder_width = d.windows[0].width();
      if (shape.encoder_width == 0 && !d.relation_encodings.empty()) {
        shape.encoder_width = d.relation_encodings[0].width();
      }
    }
  }
  if (config_.model.graph == GraphMode::kUltra) {
    for (const RelationMeta& r : relations_) shape.graph_relation_of.push_back(*graph_.relations().Find(r.id));
    shape.relation_graph = relation_graph_;
  }
  return std::make_unique<RelationExtractionModel>(config_.model, std::move(shape), config_.seed);
}

const std::vector<DocumentInstance>& Experiment::Docs(std::string_view name) const {
  if (name == "train") return train_;
  if (name == "dev") return dev_;
  if (name == "test") return test_;
  throw Error("unknown split '" + std::string(name) + "' (train, dev or test)");
}

Split Experiment::MakeSplit(const RelationExtractionModel& model, std::string_view name) const {
  Split split;
  if (config_.model.task == Task::kZeroShot) {
    const std::vector<size_t>* indices = nullptr;
    if (name == "train") {
      indices = &zs_train_;
      split.candidates = zero_shot_.train_relations;
    } else if (name == "dev") {
      indices = &zs_dev_;
      split.candidates = zero_shot_.train_relations;
    } else if (name == "test") {
      indices = &zero_shot_.test_examples;
      split.candidates = zero_shot_.test_relations;
    } else {
      throw Error("unknown split '" + std::string(name) + "' (train, dev or test)");
    }
    for (size_t i : *indices) split.docs.push_back(model.Prepare(pooled_[i], graph_, config_.seed));
    return split;
  }
  for (const DocumentInstance& d : Docs(name)) {
    split.docs.push_back(model.Prepare(d, graph_, config_.seed));
  }
  return split;
}

std::vector<std::pair<std::string, std::string>> Experiment::ModelSettings() const {
  const ModelConfig& m = config_.model;
  std::vector<std::pair<std::string, std::string>> out = {
      {"model.task", TaskName(m.task)},
      {"model.text", TextName(m.text)},
      {"model.graph", GraphName(m.graph)},
      {"model.alpha", FormatDouble(m.fusion.alpha)},
      {"model.beta", FormatDouble(m.fusion.beta)},
      {"model.block_size", std::to_string(m.block_size)},
      {"model.graph_hidden", std::to_string(m.graph_hidden)},
      {"model.graph_layers", std::to_string(m.graph_layers)},
      {"model.head_hidden", std::to_string(m.head_hidden)},
      {"model.share_relation_embeddings", m.share_relation_embeddings ? "true" : "false"},
      {"model.post_prediction", m.post_prediction ? "true" : "false"},
      {"sampler.hop_cap", std::to_string(m.sampler.hop_cap)},
      {"sampler.hops", std::to_string(m.sampler.hops)},
      {"sampler.remove_direct", m.remove_direct ? "true" : "false"},
      {"train.loss", LossKindName(m.loss)},
      {"shape.relations", std::to_string(relations_.size())},
      {"shape.graph_relation_types", std::to_string(graph_.relation_count())},
      {"train.seed", std::to_string(config_.seed)},
  };
  return out;
}

TrainResult Experiment::Train(RelationExtractionModel& model, std::ostream* log) const {
  Split train = MakeSplit(model, "train");
  Split dev = MakeSplit(model, "dev");
  std::ofstream file;
  if (!config_.log.empty()) {
    file.open(config_.log);
    if (!file) throw Error("cannot write metric log: " + config_.log.string());
  }
  TeeBuf tee(file.is_open() ? file.rdbuf() : nullptr, log ? log->rdbuf() : nullptr);
  std::ostream out(&tee);
  TrainResult result = kgre::Train(model, train, dev, relation_ids_, config_.training, &out);
  out.flush();
  if (!config_.checkpoint.empty()) {
    WriteCheckpointFile(config_.checkpoint.string(),
                        MakeCheckpoint(model.parameters(), ModelSettings()));
  }
  return result;
}

void Experiment::LoadCheckpoint(RelationExtractionModel& model) const {
  if (config_.checkpoint.empty()) throw Error("output.checkpoint is not set");
  Checkpoint ckpt = ReadCheckpointFile(config_.checkpoint.string());
  for (const auto& [key, value] : ModelSettings()) {
    if (key == "model.post_prediction" || key == "model.alpha" || key == "model.beta" ||
        key == "train.seed") {
      continue;
    }
    const std::string* stored = ckpt.Find(key);
    if (!stored || *stored != value) {
      throw Error("checkpoint setting " + key + " = " + (stored ? *stored : "<missing>") +
                  " does not match config value " + value);
    }
  }
  LoadParameters(model.parameters(), ckpt);
}

}  // namespace kgre
