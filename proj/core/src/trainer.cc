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

#include "kgre/trainer.h"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "kgre/error.h"
#include "kgre/optimizer.h"
#include "kgre/parallel.h"
#include "kgre/rng.h"

namespace kgre {

bool EarlyStopping::Update(double score) {
  ++epoch_;
  last_improved_ = best_epoch_ == 0 || score > best_score_;
  if (last_improved_) {
    best_score_ = score;
    best_epoch_ = epoch_;
    stale_ = 0;
    return false;
  }
  ++stale_;
  return stale_ >= patience_;
}

std::string FormatEpochLine(const EpochRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%.6f\t%.6f\t%.6f", r.epoch, r.train_loss,
                r.precision, r.recall, r.f1);
  return buf;
}

Evaluation Evaluate(const RelationExtractionModel& model, const Split& split,
                    const std::vector<std::string>& relation_ids, size_t threads) {
  const std::vector<Tensor> states = model.RelationStates(split.candidates);
  const std::vector<Tensor>* cache = states.empty() ? nullptr : &states;
  std::vector<std::vector<ScoredTriple>> per_doc(split.docs.size());
  ParallelFor(split.docs.size(), threads, [&](size_t d) {
    const PreparedDocument& doc = split.docs[d];
    Tape tape;
    DocumentLogits logits = model.Forward(tape, doc, split.candidates, cache);
    for (const auto& decision : model.Decide(logits, split.candidates)) {
      const PreparedPair& pair = doc.pairs[decision.pair];
      per_doc[d].push_back({{doc.doc->id, doc.doc->entities[pair.subject],
                             doc.doc->entities[pair.object], relation_ids.at(decision.relation)},
                            decision.score});
    }
  });
  Evaluation out;
  for (auto& preds : per_doc) {
    out.predictions.insert(out.predictions.end(), preds.begin(), preds.end());
  }
  for (const PreparedDocument& doc : split.docs) {
    for (const PreparedPair& pair : doc.pairs) {
      for (uint32_t r : pair.gold) {
        out.gold.insert({doc.doc->id, doc.doc->entities[pair.subject],
                         doc.doc->entities[pair.object], relation_ids.at(r)});
      }
    }
  }
  const LabeledTripleSet preds = ToTripleSet(out.predictions);
  out.micro = MicroPrf(preds, out.gold);
  std::vector<std::string> classes;
  if (split.candidates.empty()) {
    classes = relation_ids;
  } else {
    for (uint32_t c : split.candidates) classes.push_back(relation_ids.at(c));
  }
  out.macro_f1 = classes.empty() ? 0.0 : MacroF1(preds, out.gold, classes);
  return out;
}

TrainResult Train(RelationExtractionModel& model, const Split& train, const Split& validation,
                  const std::vector<std::string>& relation_ids, const TrainConfig& config,
                  std::ostream* log) {
  if (train.docs.empty() || validation.docs.empty()) {
    throw Error("training needs non-empty train and validation splits");
  }
  if (config.batch_size == 0) throw Error("batch_size must be positive");
  if (!(config.lr_text > 0.0) || !(config.lr_graph > 0.0)) {
    throw Error("learning rates must be positive");
  }
  if (config.metric != "micro" && config.metric != "macro") {
    throw Error("metric must be micro or macro, got " + config.metric);
  }
  ParameterStore& store = model.parameters();
  AdamWOptions options;
  options.learning_rates = {config.lr_text, config.lr_graph};
  options.weight_decay = config.weight_decay;
  AdamW optimizer(store, options);
  EarlyStopping stopping(config.patience);
  TrainResult result;
  std::vector<Tensor> best = store.Snapshot();

  std::vector<size_t> order(train.docs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(DeriveSeed(config.seed, {0x65706f6368ULL, epoch}));
    rng.Shuffle(order);
    double loss_sum = 0.0;
    size_t pair_count = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      const size_t n = end - start;
      std::vector<std::vector<Tensor>> doc_grads(n);
      std::vector<double> doc_loss(n, 0.0);
      ParallelFor(n, config.threads, [&](size_t k) {
        const PreparedDocument& doc = train.docs[order[start + k]];
        Tape tape;
        DocumentLogits logits = model.Forward(tape, doc, train.candidates);
        Var loss = model.Loss(logits, doc, train.candidates);
        const double value = loss.value()[0];
        if (!std::isfinite(value)) {
          throw Error("non-finite loss at epoch " + std::to_string(epoch) + " on document " +
                      doc.doc->id);
        }
        doc_loss[k] = value;
        tape.Backward(loss);
        std::vector<Tensor>& grads = doc_grads[k];
        grads.resize(store.size());
        for (const auto& [param, grad] : tape.ParameterGradients()) {
          if (grad) grads[param->index] = *grad;
        }
      });
      std::vector<Tensor> grads(store.size());
      size_t batch_pairs = 0;
      for (size_t k = 0; k < n; ++k) {
        loss_sum += doc_loss[k];
        batch_pairs += train.docs[order[start + k]].pairs.size();
        for (size_t p = 0; p < store.size(); ++p) {
          const Tensor& g = doc_grads[k][p];
          if (g.size() == 0) continue;
          if (grads[p].size() == 0) {
            grads[p] = g;
          } else {
            grads[p].AddScaled(g, 1.0);
          }
        }
      }
      pair_count += batch_pairs;
      const double scale = 1.0 / static_cast<double>(std::max<size_t>(1, batch_pairs));
      for (Tensor& g : grads) {
        for (double& v : g.values()) v *= scale;
      }
      if (config.max_grad_norm > 0.0) ClipGradientNorm(grads, config.max_grad_norm);
      optimizer.Step(grads);
    }

    Evaluation eval = Evaluate(model, validation, relation_ids, config.threads);
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(std::max<size_t>(1, pair_count));
    record.precision = eval.micro.precision;
    record.recall = eval.micro.recall;
    record.f1 = config.metric == "macro" ? eval.macro_f1 : eval.micro.f1;
    result.history.push_back(record);
    if (log) *log << FormatEpochLine(record) << '\n' << std::flush;

    const bool stop = stopping.Update(record.f1);
    if (stopping.last_improved()) best = store.Snapshot();
    if (stop || (config.target_score > 0.0 && record.f1 >= config.target_score)) {
      result.stopped_early = epoch < config.epochs;
      break;
    }
  }
  store.Restore(best);
  result.best_epoch = stopping.best_epoch();
  result.best_score = stopping.best_score();
  return result;
}

}  // namespace kgre
