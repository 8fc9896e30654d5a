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

#include "kgre/model.h"

#include <optional>

#include "kgre/error.h"
#include "kgre/ops.h"
#include "kgre/rng.h"

namespace kgre {

uint64_t HashString(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<uint32_t> AllRelations(size_t n) {
  std::vector<uint32_t> out(n);
  for (uint32_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

RelationExtractionModel::RelationExtractionModel(const ModelConfig& config, ModelShape shape,
                                                 uint64_t seed)
    : config_(config), shape_(std::move(shape)) {
  if (config_.text == TextMode::kOff && config_.graph == GraphMode::kOff) {
    throw Error("model needs a text or a graph component");
  }
  if (shape_.relations == 0) throw Error("model needs at least one relation");
  if (config_.task == Task::kZeroShot) {
    if (config_.loss != LossKind::kCrossEntropy) {
      throw Error("zero-shot training uses the cross_entropy loss");
    }
    if (config_.text == TextMode::kSupervised || config_.graph == GraphMode::kNbf) {
      throw Error("zero-shot task supports text = mc|off and graph = ultra|off");
    }
  } else if (config_.text == TextMode::kMultipleChoice || config_.graph == GraphMode::kUltra) {
    throw Error("supervised task supports text = supervised|off and graph = nbf|off");
  }
  if (config_.post_prediction &&
      (config_.text != TextMode::kSupervised || config_.graph != GraphMode::kNbf ||
       !IsMultiLabel(config_.loss))) {
    throw Error("post_prediction needs supervised text, nbf graph and a multi-label loss");
  }

  Rng rng(DeriveSeed(seed, {0x696e6974ULL}));
  if (config_.text != TextMode::kOff) {
    if (shape_.encoder_width == 0) throw Error("text component needs encoder outputs");
    TextHeadConfig tc;
    tc.width = shape_.encoder_width;
    tc.outputs = config_.text == TextMode::kSupervised ? OutputSize(shape_.relations) : 1;
    tc.block_size = config_.block_size;
    text_ = std::make_unique<TextHead>(store_, tc, rng);
  }
  if (config_.graph == GraphMode::kNbf) {
    NbfConfig nc;
    nc.hidden = config_.graph_hidden;
    nc.layers = config_.graph_layers;
    nc.head_hidden = config_.head_hidden;
    // Multi-label models always carry the predicted-relation types R'.
    nc.relation_types = shape_.graph_relation_types +
                        (IsMultiLabel(config_.loss) ? 2 * shape_.relations : 0);
    nc.outputs = OutputSize(shape_.relations);
    nc.share_relation_embeddings = config_.share_relation_embeddings;
    nbf_ = std::make_unique<NbfModel>(store_, nc, rng);
  } else if (config_.graph == GraphMode::kUltra) {
    if (shape_.graph_relation_of.size() != shape_.relations) {
      throw Error("zero-shot graph scoring needs a KG relation for every relation in R");
    }
    if (shape_.relation_graph.relations != shape_.graph_relation_types) {
      throw Error("relation graph does not match the KG relation types");
    }
    UltraConfig uc;
    uc.hidden = config_.graph_hidden;
    uc.layers = config_.graph_layers;
    uc.head_hidden = config_.head_hidden;
    ultra_ = std::make_unique<UltraModel>(store_, uc, rng);
    relation_message_graph_ = ToMessageGraph(shape_.relation_graph);
  }
}

DecisionMode RelationExtractionModel::decision_mode() const {
  return IsMultiLabel(config_.loss) ? DecisionMode::kMultiLabel : DecisionMode::kSingleLabel;
}

size_t RelationExtractionModel::OutputSize(size_t candidates) const {
  if (config_.task == Task::kZeroShot) return candidates;
  return IsMultiLabel(config_.loss) ? shape_.relations + 1 : shape_.relations;
}

PreparedDocument RelationExtractionModel::Prepare(const DocumentInstance& doc,
                                                  const KnowledgeGraph& graph,
                                                  uint64_t seed) const {
  PreparedDocument out;
  out.doc = &doc;
  for (const LabeledPair& p : doc.pairs) {
    PreparedPair pp;
    pp.subject = p.subject;
    pp.object = p.object;
    pp.gold = p.relations;
    out.pairs.push_back(std::move(pp));
  }
  if (config_.text == TextMode::kSupervised) {
    if (doc.windows.empty()) throw Error(doc.id + ": supervised text needs encoder windows");
    DocumentTokens tokens = MergeWindows(doc.windows);
    if (tokens.hidden.cols() != shape_.encoder_width) {
      throw ShapeError(doc.id + ": encoder width " + std::to_string(tokens.hidden.cols()) +
                       " but model expects " + std::to_string(shape_.encoder_width));
    }
    std::vector<std::optional<EntityFeatures>> features(doc.entities.size());
    auto feature = [&](uint32_t e) -> const EntityFeatures& {
      if (!features[e]) features[e] = EntityRepresentation(doc, tokens, e);
      return *features[e];
    };
    for (PreparedPair& pp : out.pairs) {
      const EntityFeatures& s = feature(pp.subject);
      const EntityFeatures& o = feature(pp.object);
      pp.subject_rep = s.pooled;
      pp.object_rep = o.pooled;
      pp.context = PairContext(s.attention, o.attention, tokens.hidden);
    }
  } else if (config_.text == TextMode::kMultipleChoice) {
    if (doc.relation_encodings.size() != shape_.relations) {
      throw Error(doc.id + ": multiple-choice text needs one export per relation");
    }
    for (const EncoderOutput& e : doc.relation_encodings) {
      if (e.width() != shape_.encoder_width) {
        throw ShapeError(doc.id + ": relation export width mismatch");
      }
      out.first_tokens.push_back(e.hidden.Row(0));
    }
  }
  if (config_.graph != GraphMode::kOff) {
    out.subgraph = BuildDocumentSubgraph(graph, doc.links, DeriveSeed(seed, {HashString(doc.id)}),
                                         config_.sampler);
    if (config_.remove_direct && config_.graph == GraphMode::kNbf) {
      std::vector<std::pair<LocalId, LocalId>> direct;
      for (const PreparedPair& pp : out.pairs) {
        direct.emplace_back(out.subgraph.anchors[pp.subject], out.subgraph.anchors[pp.object]);
      }
      out.subgraph = RemoveDirectTriples(out.subgraph, direct);
    }
  }
  return out;
}

std::vector<Tensor> RelationExtractionModel::RelationStates(
    std::span<const uint32_t> candidates) const {
  std::vector<Tensor> out;
  if (!ultra_) return out;
  Tape tape;
  for (uint32_t c : candidates) {
    out.push_back(ultra_->RelationRepresentations(tape, relation_message_graph_,
                                                  shape_.graph_relation_of.at(c))
                      .value());
  }
  return out;
}

std::vector<Var> RelationExtractionModel::GraphLogits(Tape& tape, const PreparedDocument& doc,
                                                      std::span<const uint32_t> candidates,
                                                      const std::vector<Tensor>* relation_states,
                                                      const std::vector<Var>& text,
                                                      DocumentLogits& out) const {
  const Subgraph& base = doc.subgraph;
  if (nbf_) {
    std::optional<Enrichment> enriched;
    if (config_.post_prediction) {
      std::vector<PairPrediction> predictions;
      for (size_t i = 0; i < doc.pairs.size(); ++i) {
        for (uint32_t slot : DecideLabels(text[i].value(), DecisionMode::kMultiLabel)) {
          predictions.push_back({base.anchors[doc.pairs[i].subject],
                                 base.anchors[doc.pairs[i].object], slot - 1});
        }
      }
      enriched = EnrichSubgraph(base, predictions, shape_.graph_relation_types, shape_.relations);
      out.added_edges = enriched->added_edges;
      out.skipped_predictions = enriched->skipped;
    }
    std::vector<NbfModel::PairQuery> queries;
    for (const PreparedPair& pp : doc.pairs) {
      queries.push_back({base.anchors[pp.subject], base.anchors[pp.object]});
    }
    return nbf_->ScoreAllPairs(tape, enriched ? enriched->graph : base, queries);
  }

  std::vector<RelationId> graph_candidates;
  std::vector<Var> states;
  for (size_t i = 0; i < candidates.size(); ++i) {
    graph_candidates.push_back(shape_.graph_relation_of.at(candidates[i]));
    if (relation_states) {
      states.push_back(tape.Constant(relation_states->at(i)));
    } else {
      states.push_back(
          ultra_->RelationRepresentations(tape, relation_message_graph_, graph_candidates.back()));
    }
  }
  std::vector<Var> logits;
  for (const PreparedPair& pp : doc.pairs) {
    logits.push_back(ultra_->Logits(tape, base, base.anchors[pp.subject], base.anchors[pp.object],
                                    graph_candidates, states));
  }
  return logits;
}

DocumentLogits RelationExtractionModel::Forward(Tape& tape, const PreparedDocument& doc,
                                                std::span<const uint32_t> candidates,
                                                const std::vector<Tensor>* relation_states) const {
  std::vector<uint32_t> all;
  if (config_.task == Task::kSupervised) {
    all = AllRelations(shape_.relations);
    candidates = all;
  } else if (candidates.empty()) {
    throw Error("zero-shot forward needs candidate relations");
  }
  DocumentLogits out = ForwardTextOnly(tape, doc, candidates);
  if (!nbf_ && !ultra_) return out;
  out.graph = GraphLogits(tape, doc, candidates, relation_states, out.text, out);
  out.fused.clear();
  for (size_t i = 0; i < doc.pairs.size(); ++i) {
    out.fused.push_back(out.text.empty() ? out.graph[i]
                                         : Fuse(out.text[i], out.graph[i], config_.fusion));
  }
  return out;
}

DocumentLogits RelationExtractionModel::ForwardTextOnly(Tape& tape, const PreparedDocument& doc,
                                                        std::span<const uint32_t> candidates) const {
  DocumentLogits out;
  if (config_.text == TextMode::kSupervised) {
    for (const PreparedPair& pp : doc.pairs) {
      out.text.push_back(text_->SupervisedLogits(tape, pp.subject_rep, pp.object_rep, pp.context));
    }
  } else if (config_.text == TextMode::kMultipleChoice) {
    std::vector<Tensor> tokens;
    for (uint32_t c : candidates) tokens.push_back(doc.first_tokens.at(c));
    Var logits = text_->MultipleChoiceLogits(tape, tokens);
    out.text.assign(doc.pairs.size(), logits);
  }
  out.fused = out.text;
  return out;
}

Var RelationExtractionModel::Loss(const DocumentLogits& logits, const PreparedDocument& doc,
                                  std::span<const uint32_t> candidates) const {
  Var total;
  for (size_t i = 0; i < doc.pairs.size(); ++i) {
    std::vector<uint32_t> gold = doc.pairs[i].gold;
    if (config_.task == Task::kZeroShot) {
      for (uint32_t& g : gold) {
        size_t pos = 0;
        while (pos < candidates.size() && candidates[pos] != g) ++pos;
        if (pos == candidates.size()) {
          throw Error(doc.doc->id + ": gold relation " + std::to_string(g) +
                      " not among candidates");
        }
        g = static_cast<uint32_t>(pos);
      }
    }
    Var loss = RelationLoss(config_.loss, logits.fused[i], gold);
    total = total.valid() ? ops::Add(total, loss) : loss;
  }
  if (!total.valid()) throw Error(doc.doc->id + ": document has no pairs");
  return total;
}

std::vector<RelationExtractionModel::Decision> RelationExtractionModel::Decide(
    const DocumentLogits& logits, std::span<const uint32_t> candidates) const {
  std::vector<Decision> out;
  for (size_t i = 0; i < logits.fused.size(); ++i) {
    const Tensor& p = logits.fused[i].value();
    for (uint32_t slot : DecideLabels(p, decision_mode())) {
      uint32_t relation = slot;
      if (config_.task == Task::kZeroShot) {
        relation = candidates[slot];
      } else if (decision_mode() == DecisionMode::kMultiLabel) {
        relation = slot - 1;
      }
      out.push_back({i, relation, p[slot]});
    }
  }
  return out;
}

}  // namespace kgre
