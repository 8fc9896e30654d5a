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

#ifndef KGRE_EXPERIMENT_H_
#define KGRE_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgre/config.h"
#include "kgre/document.h"
#include "kgre/kg_store.h"
#include "kgre/model.h"
#include "kgre/trainer.h"
#include "kgre/ultra.h"

namespace kgre {

struct ExperimentConfig {
  std::filesystem::path kg;
  std::filesystem::path relations;
  std::filesystem::path train;
  std::filesystem::path dev;
  std::filesystem::path test;

  ModelConfig model;
  TrainConfig training;

  // Zero-shot splitting and support-graph construction.
  size_t test_relations = 5;
  size_t resamples = 5;
  size_t split_index = 0;
  double validation_fraction = 0.2;
  SupportOptions support;

  std::filesystem::path checkpoint;
  std::filesystem::path log;
  std::filesystem::path predictions;

  uint64_t seed = 0;
};

// Every key a config file may set.
std::span<const std::string_view> KnownConfigKeys();

// Validates keys and fills defaults. `seed` and `threads` come from flags.
ExperimentConfig ParseExperimentConfig(const Config& config);

// Loaded data plus the model/split plumbing shared by train, predict,
// eval and postpredict.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const KnowledgeGraph& graph() const { return graph_; }
  const std::vector<RelationMeta>& relations() const { return relations_; }
  const std::vector<std::string>& relation_ids() const { return relation_ids_; }

  std::unique_ptr<RelationExtractionModel> BuildModel() const;

  // name: train | dev | test.
  Split MakeSplit(const RelationExtractionModel& model, std::string_view name) const;

  // Trains, writes the checkpoint and the metric log when configured.
  TrainResult Train(RelationExtractionModel& model, std::ostream* log) const;

  // Loads the configured checkpoint; its model settings must match.
  void LoadCheckpoint(RelationExtractionModel& model) const;

  // Model settings recorded in checkpoints.
  std::vector<std::pair<std::string, std::string>> ModelSettings() const;

 private:
  const std::vector<DocumentInstance>& Docs(std::string_view name) const;
  void BuildZeroShotSplit();

  ExperimentConfig config_;
  KnowledgeGraph graph_;
  std::vector<RelationMeta> relations_;
  std::vector<std::string> relation_ids_;
  std::vector<DocumentInstance> train_, dev_, test_;
  // Zero-shot: pooled examples and the selected split.
  std::vector<DocumentInstance> pooled_;
  ZeroShotSplit zero_shot_;
  std::vector<size_t> zs_train_, zs_dev_;
  RelationGraph relation_graph_;
};

}  // namespace kgre

#endif  // KGRE_EXPERIMENT_H_
