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

#ifndef KGRE_TRAINER_H_
#define KGRE_TRAINER_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgre/eval.h"
#include "kgre/model.h"

namespace kgre {

struct TrainConfig {
  size_t batch_size = 8;
  double lr_text = 3e-5;
  double lr_graph = 1e-4;
  double weight_decay = 0.01;
  size_t epochs = 100;
  size_t patience = 10;
  std::string metric = "micro";  // micro | macro
  double max_grad_norm = 0.0;    // 0 disables clipping
  uint64_t seed = 0;
  size_t threads = 1;
  // Stop as soon as the validation score reaches this value (<= 0: never).
  double target_score = 0.0;
};

// Stops after `patience` consecutive epochs without strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(size_t patience) : patience_(patience) {}

  // Records one epoch's score; returns true when training should stop.
  bool Update(double score);

  size_t best_epoch() const { return best_epoch_; }  // 1-based, 0 before any update
  double best_score() const { return best_score_; }
  bool last_improved() const { return last_improved_; }

 private:
  size_t patience_;
  size_t epoch_ = 0;
  size_t best_epoch_ = 0;
  double best_score_ = 0.0;
  size_t stale_ = 0;
  bool last_improved_ = false;
};

// A dataset split ready for the model. Zero-shot splits list the candidate
// relations scored for every example.
struct Split {
  std::vector<PreparedDocument> docs;
  std::vector<uint32_t> candidates;
};

struct Evaluation {
  std::vector<ScoredTriple> predictions;
  LabeledTripleSet gold;
  Prf micro;
  double macro_f1 = 0.0;
};

// Runs the model over a split and scores its decisions. `relation_ids`
// names the relations of R.
Evaluation Evaluate(const RelationExtractionModel& model, const Split& split,
                    const std::vector<std::string>& relation_ids, size_t threads = 1);

struct EpochRecord {
  size_t epoch = 0;
  double train_loss = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;  // the early-stopping metric
};

// epoch<TAB>loss<TAB>P<TAB>R<TAB>F1 with fixed precision.
std::string FormatEpochLine(const EpochRecord& record);

struct TrainResult {
  std::vector<EpochRecord> history;
  size_t best_epoch = 0;
  double best_score = 0.0;
  bool stopped_early = false;
};

// Mini-batch AdamW over documents with per-example tapes; gradients are
// summed in example order, so results do not depend on the thread count.
// Leaves the model holding the best validation parameters. Throws on a
// non-finite loss.
TrainResult Train(RelationExtractionModel& model, const Split& train, const Split& validation,
                  const std::vector<std::string>& relation_ids, const TrainConfig& config,
                  std::ostream* log = nullptr);

}  // namespace kgre

#endif  // KGRE_TRAINER_H_
