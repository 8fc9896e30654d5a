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

#ifndef KGRE_TEXT_HEAD_H_
#define KGRE_TEXT_HEAD_H_

#include <span>
#include <vector>

#include "kgre/document.h"
#include "kgre/rng.h"
#include "kgre/tape.h"

namespace kgre {

// A document's windows flattened into one token space.
struct DocumentTokens {
  Tensor hidden;                  // [T x d]
  std::vector<uint32_t> offsets;  // per window

  size_t length() const { return hidden.rows(); }
};

// Concatenates windows sorted by offset. Tokens covered by several windows
// are taken from the earliest one. Throws when the first offset is not 0,
// offsets decrease, windows leave a gap or widths differ.
DocumentTokens MergeWindows(std::span<const EncoderOutput> windows);

struct EntityFeatures {
  Tensor pooled;     // logsumexp of marker encodings, [d]
  Tensor attention;  // mean of mention attention rows, sums to 1, [T]
};

EntityFeatures EntityRepresentation(const DocumentInstance& doc,
                                    const DocumentTokens& tokens, uint32_t entity);

// Localized context: c = sum_i q_i h_i with q the normalized product of the
// two attention distributions, or uniform when the product has no mass.
Tensor PairContext(const Tensor& attention_k, const Tensor& attention_l,
                   const Tensor& doc_hidden);

struct TextHeadConfig {
  size_t width = 0;       // encoder hidden size d
  size_t outputs = 0;     // logit slots (|R|, or |R| + 1 with a threshold)
  size_t block_size = 64; // bilinear block; must divide width
  size_t mc_hidden = 0;   // zero-shot scorer hidden size; 0 means width
};

// Trainable layers over frozen encoder features: subject/object projections
// with a grouped bilinear classifier, and the multiple-choice scorer.
class TextHead {
 public:
  TextHead(ParameterStore& store, const TextHeadConfig& config, Rng& rng);

  const TextHeadConfig& config() const { return config_; }

  // s = W_s [h_k; c] + b_s, o = W_o [h_l; c] + b_o, logits = bilinear(s, o).
  Var SupervisedLogits(Tape& tape, const Tensor& subject, const Tensor& object,
                       const Tensor& context) const;

  // score(r) = W_2 tanh(W_1 h_r + b_1) + b_2 for each first-token encoding.
  Var MultipleChoiceLogits(Tape& tape, std::span<const Tensor> first_tokens) const;
  Var MultipleChoiceLogits(Tape& tape, std::span<const EncoderOutput> encodings) const;

  std::vector<Parameter*> SupervisedParameters() const;
  std::vector<Parameter*> MultipleChoiceParameters() const;

 private:
  TextHeadConfig config_;
  Parameter* subject_weight_;
  Parameter* subject_bias_;
  Parameter* object_weight_;
  Parameter* object_bias_;
  Parameter* bilinear_;
  Parameter* mc_hidden_weight_;
  Parameter* mc_hidden_bias_;
  Parameter* mc_out_weight_;
  Parameter* mc_out_bias_;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialised matrix.
Tensor InitLinear(size_t out, size_t in, Rng& rng);

}  // namespace kgre

#endif  // KGRE_TEXT_HEAD_H_
