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

#include "kgre/text_head.h"

#include <algorithm>
#include <cmath>

#include "kgre/error.h"
#include "kgre/ops.h"

namespace kgre {

DocumentTokens MergeWindows(std::span<const EncoderOutput> windows) {
  DocumentTokens out;
  if (windows.empty()) throw Error("document has no encoder windows");
  const size_t d = windows[0].width();
  size_t end = 0;
  for (size_t w = 0; w < windows.size(); ++w) {
    const EncoderOutput& win = windows[w];
    if (win.width() != d) throw ShapeError("encoder windows disagree on width");
    if (w == 0 && win.offset != 0) throw Error("first window must start at offset 0");
    if (w > 0 && win.offset < windows[w - 1].offset) {
      throw Error("encoder windows are not sorted by offset");
    }
    if (win.offset > end) throw Error("gap between encoder windows at token " + std::to_string(end));
    end = std::max(end, win.offset + win.tokens());
    out.offsets.push_back(win.offset);
  }
  out.hidden = Tensor(Shape{end, d});
  size_t filled = 0;
  for (const EncoderOutput& win : windows) {
    for (size_t t = std::max<size_t>(filled, win.offset); t < win.offset + win.tokens(); ++t) {
      std::copy_n(win.hidden.data() + (t - win.offset) * d, d, out.hidden.data() + t * d);
    }
    filled = std::max<size_t>(filled, win.offset + win.tokens());
  }
  return out;
}

EntityFeatures EntityRepresentation(const DocumentInstance& doc,
                                    const DocumentTokens& tokens, uint32_t entity) {
  std::vector<Mention> mentions;
  for (const Mention& m : doc.mentions) {
    if (m.entity == entity) mentions.push_back(m);
  }
  if (mentions.empty()) {
    throw Error(doc.id + ": entity " + std::to_string(entity) + " has no mentions");
  }
  // Canonical order makes pooling exactly invariant to mention order.
  std::sort(mentions.begin(), mentions.end(), [](const Mention& a, const Mention& b) {
    return std::tie(a.window, a.marker) < std::tie(b.window, b.marker);
  });
  const size_t d = tokens.hidden.cols();
  Tensor markers(Shape{mentions.size(), d});
  EntityFeatures out;
  out.attention = Tensor(Shape{tokens.length()});
  for (size_t i = 0; i < mentions.size(); ++i) {
    const EncoderOutput& win = doc.windows[mentions[i].window];
    auto h = win.hidden.row(mentions[i].marker);
    std::copy(h.begin(), h.end(), markers.row(i).begin());
    auto a = win.attention.row(mentions[i].marker);
    for (size_t t = 0; t < a.size(); ++t) out.attention[win.offset + t] += a[t];
  }
  out.pooled = LogSumExpRows(markers);
  double total = 0.0;
  for (double v : out.attention.values()) total += v;
  if (total > 0.0) {
    for (double& v : out.attention.values()) v /= total;
  }
  return out;
}

Tensor PairContext(const Tensor& attention_k, const Tensor& attention_l,
                   const Tensor& doc_hidden) {
  const size_t n = attention_k.size();
  if (attention_l.size() != n || doc_hidden.rows() != n) {
    throw ShapeError("PairContext: attention " + ShapeToString(attention_k.shape()) +
                     " / " + ShapeToString(attention_l.shape()) + " vs tokens " +
                     ShapeToString(doc_hidden.shape()));
  }
  std::vector<double> q(n);
  double mass = 0.0;
  for (size_t i = 0; i < n; ++i) {
    q[i] = attention_k[i] * attention_l[i];
    mass += q[i];
  }
  if (mass > 1e-30) {
    for (double& v : q) v /= mass;
  } else {
    std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(n));
  }
  const size_t d = doc_hidden.cols();
  Tensor c(Shape{d});
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) c[j] += q[i] * doc_hidden.at(i, j);
  }
  return c;
}

Tensor InitLinear(size_t out, size_t in, Rng& rng) {
  Tensor w(Shape{out, in});
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& v : w.values()) v = rng.Uniform(-bound, bound);
  return w;
}

TextHead::TextHead(ParameterStore& store, const TextHeadConfig& config, Rng& rng)
    : config_(config) {
  const size_t d = config.width;
  if (d == 0 || config.outputs == 0) throw Error("text head needs positive width and outputs");
  if (config_.block_size == 0 || d % config_.block_size != 0) {
    throw Error("bilinear block size " + std::to_string(config_.block_size) +
                " does not divide width " + std::to_string(d));
  }
  if (config_.mc_hidden == 0) config_.mc_hidden = d;
  const size_t k = config_.block_size;
  subject_weight_ = &store.Add("text.subject.weight", InitLinear(d, 2 * d, rng), kTextGroup);
  subject_bias_ = &store.Add("text.subject.bias", Tensor(Shape{d}), kTextGroup);
  object_weight_ = &store.Add("text.object.weight", InitLinear(d, 2 * d, rng), kTextGroup);
  object_bias_ = &store.Add("text.object.bias", Tensor(Shape{d}), kTextGroup);
  Tensor bilinear(Shape{d / k, config.outputs, k, k});
  const double bound = 1.0 / static_cast<double>(k);
  for (double& v : bilinear.values()) v = rng.Uniform(-bound, bound);
  bilinear_ = &store.Add("text.bilinear", std::move(bilinear), kTextGroup);
  const size_t h = config_.mc_hidden;
  mc_hidden_weight_ = &store.Add("text.mc.hidden.weight", InitLinear(h, d, rng), kTextGroup);
  mc_hidden_bias_ = &store.Add("text.mc.hidden.bias", Tensor(Shape{h}), kTextGroup);
  mc_out_weight_ = &store.Add("text.mc.out.weight", InitLinear(1, h, rng), kTextGroup);
  mc_out_bias_ = &store.Add("text.mc.out.bias", Tensor(Shape{1}), kTextGroup);
}

Var TextHead::SupervisedLogits(Tape& tape, const Tensor& subject, const Tensor& object,
                               const Tensor& context) const {
  const size_t d = config_.width;
  if (subject.size() != d || object.size() != d || context.size() != d) {
    throw ShapeError("SupervisedLogits: expected width " + std::to_string(d) + ", got " +
                     ShapeToString(subject.shape()) + ", " + ShapeToString(object.shape()) +
                     ", " + ShapeToString(context.shape()));
  }
  Var c = tape.Constant(context.Reshaped({d}));
  Var sk[] = {tape.Constant(subject.Reshaped({d})), c};
  Var ol[] = {tape.Constant(object.Reshaped({d})), c};
  Var s = ops::Linear(ops::ConcatCols(sk), tape.Param(*subject_weight_),
                      tape.Param(*subject_bias_));
  Var o = ops::Linear(ops::ConcatCols(ol), tape.Param(*object_weight_),
                      tape.Param(*object_bias_));
  return ops::GroupedBilinear(s, o, tape.Param(*bilinear_), config_.block_size);
}

Var TextHead::MultipleChoiceLogits(Tape& tape, std::span<const Tensor> first_tokens) const {
  if (first_tokens.empty()) throw Error("multiple-choice scoring needs at least one relation");
  const size_t d = config_.width;
  Tensor stacked(Shape{first_tokens.size(), d});
  for (size_t r = 0; r < first_tokens.size(); ++r) {
    if (first_tokens[r].size() != d) {
      throw ShapeError("relation encoding width " + ShapeToString(first_tokens[r].shape()) +
                       " does not match text width " + std::to_string(d));
    }
    std::copy_n(first_tokens[r].data(), d, stacked.row(r).data());
  }
  Var hidden = ops::Tanh(ops::Linear(tape.Constant(std::move(stacked)),
                                     tape.Param(*mc_hidden_weight_),
                                     tape.Param(*mc_hidden_bias_)));
  Var scores = ops::Linear(hidden, tape.Param(*mc_out_weight_), tape.Param(*mc_out_bias_));
  return ops::Reshape(scores, {first_tokens.size()});
}

Var TextHead::MultipleChoiceLogits(Tape& tape, std::span<const EncoderOutput> encodings) const {
  std::vector<Tensor> first;
  first.reserve(encodings.size());
  for (const EncoderOutput& e : encodings) {
    if (e.tokens() == 0) throw Error("missing relation encoding");
    first.push_back(e.hidden.Row(0));
  }
  return MultipleChoiceLogits(tape, first);
}

std::vector<Parameter*> TextHead::SupervisedParameters() const {
  return {subject_weight_, subject_bias_, object_weight_, object_bias_, bilinear_};
}

std::vector<Parameter*> TextHead::MultipleChoiceParameters() const {
  return {mc_hidden_weight_, mc_hidden_bias_, mc_out_weight_, mc_out_bias_};
}

}  // namespace kgre
