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

#ifndef KGRE_MODEL_H_
#define KGRE_MODEL_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgre/document.h"
#include "kgre/eval.h"
#include "kgre/graph_module.h"
#include "kgre/kg_store.h"
#include "kgre/losses.h"
#include "kgre/pipeline.h"
#include "kgre/sampler.h"
#include "kgre/text_head.h"
#include "kgre/ultra.h"

namespace kgre {

enum class Task { kSupervised, kZeroShot };
enum class TextMode { kOff, kSupervised, kMultipleChoice };
enum class GraphMode { kOff, kNbf, kUltra };

struct ModelConfig {
  Task task = Task::kSupervised;
  LossKind loss = LossKind::kHingeAbl;
  TextMode text = TextMode::kSupervised;
  GraphMode graph = GraphMode::kNbf;
  FusionWeights fusion;
  size_t block_size = 64;
  size_t graph_hidden = 32;
  size_t graph_layers = 4;
  size_t head_hidden = 32;
  bool share_relation_embeddings = false;
  bool post_prediction = false;
  NeighborhoodOptions sampler;
  bool remove_direct = false;
};

// Data-dependent sizes fixed when the model is built.
struct ModelShape {
  size_t encoder_width = 0;         // 0 when there is no text input
  size_t relations = 0;             // |R|
  size_t graph_relation_types = 0;  // inverse-augmented |R_G|
  // KG relation of each relation in R (zero-shot graph scoring only).
  std::vector<RelationId> graph_relation_of;
  RelationGraph relation_graph;     // zero-shot graph scoring only
};

// Frozen per-pair text features.
struct PreparedPair {
  uint32_t subject = 0;  // document entity
  uint32_t object = 0;
  std::vector<uint32_t> gold;  // indices into R
  Tensor subject_rep;
  Tensor object_rep;
  Tensor context;
};

// Everything the trainable parts need from one document, computed once.
struct PreparedDocument {
  const DocumentInstance* doc = nullptr;
  std::vector<PreparedPair> pairs;
  Subgraph subgraph;             // anchors = document entities in order
  std::vector<Tensor> first_tokens;  // per relation of R (multiple choice)
};

struct DocumentLogits {
  std::vector<Var> text;   // empty when text is off
  std::vector<Var> graph;  // empty when graph is off
  std::vector<Var> fused;
  size_t added_edges = 0;
  size_t skipped_predictions = 0;
};

// Text head and graph module combined by logit fusion.
class RelationExtractionModel {
 public:
  RelationExtractionModel(const ModelConfig& config, ModelShape shape, uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const ModelShape& shape() const { return shape_; }
  ParameterStore& parameters() { return store_; }
  const ParameterStore& parameters() const { return store_; }

  DecisionMode decision_mode() const;
  // Logit slots per pair: |R| + 1 multi-label, |R| single-label, |C| zero-shot.
  size_t OutputSize(size_t candidates) const;

  PreparedDocument Prepare(const DocumentInstance& doc, const KnowledgeGraph& graph,
                           uint64_t seed) const;

  // Zero-shot relation representations for the given candidates (indices into
  // R), computed once and reused across documents.
  std::vector<Tensor> RelationStates(std::span<const uint32_t> candidates) const;

  // `candidates` lists indices into R; ignored for supervised tasks.
  DocumentLogits Forward(Tape& tape, const PreparedDocument& doc,
                         std::span<const uint32_t> candidates,
                         const std::vector<Tensor>* relation_states = nullptr) const;
  // Same with the text-only path forced (beta = 0 fusion, no graph pass).
  DocumentLogits ForwardTextOnly(Tape& tape, const PreparedDocument& doc,
                                 std::span<const uint32_t> candidates) const;

  // Sum of per-pair losses. Gold relations outside the candidates throw.
  Var Loss(const DocumentLogits& logits, const PreparedDocument& doc,
           std::span<const uint32_t> candidates) const;

  // Decided relations (indices into R) with their fused scores.
  struct Decision {
    size_t pair = 0;
    uint32_t relation = 0;
    double score = 0.0;
  };
  std::vector<Decision> Decide(const DocumentLogits& logits,
                               std::span<const uint32_t> candidates) const;

 private:
  std::vector<Var> GraphLogits(Tape& tape, const PreparedDocument& doc,
                               std::span<const uint32_t> candidates,
                               const std::vector<Tensor>* relation_states,
                               const std::vector<Var>& text, DocumentLogits& out) const;

  ModelConfig config_;
  ModelShape shape_;
  ParameterStore store_;
  std::unique_ptr<TextHead> text_;
  std::unique_ptr<NbfModel> nbf_;
  std::unique_ptr<UltraModel> ultra_;
  MessageGraph relation_message_graph_;
};

// Deterministic 64-bit hash of a string (FNV-1a).
uint64_t HashString(std::string_view s);

// All relation indices 0..n-1.
std::vector<uint32_t> AllRelations(size_t n);

}  // namespace kgre

#endif  // KGRE_MODEL_H_
