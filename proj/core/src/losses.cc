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

#include "kgre/losses.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kgre/error.h"

namespace kgre {
namespace {

std::vector<bool> PositiveMask(size_t slots, std::span<const uint32_t> positives) {
  std::vector<bool> mask(slots, false);
  for (uint32_t r : positives) {
    if (r == 0 || r >= slots) {
      throw Error("positive slot " + std::to_string(r) + " invalid for " +
                  std::to_string(slots) + " logits with threshold at 0");
    }
    mask[r] = true;
  }
  return mask;
}

void CheckVector(const Var& logits, const char* what) {
  if (logits.value().rank() != 1 || logits.value().size() == 0) {
    throw ShapeError(std::string(what) + " expects a non-empty logit vector, got " +
                     ShapeToString(logits.shape()));
  }
}

// log-softmax restricted to `members`; writes probabilities into `prob`.
double LogSumExpOver(const Tensor& p, const std::vector<uint32_t>& members,
                     std::vector<double>& prob) {
  double m = -INFINITY;
  for (uint32_t r : members) m = std::max(m, p[r]);
  double s = 0.0;
  for (uint32_t r : members) s += std::exp(p[r] - m);
  prob.assign(members.size(), 0.0);
  for (size_t i = 0; i < members.size(); ++i) prob[i] = std::exp(p[members[i]] - m) / s;
  return m + std::log(s);
}

}  // namespace

LossKind ParseLossKind(std::string_view name) {
  if (name == "hinge_abl") return LossKind::kHingeAbl;
  if (name == "atl") return LossKind::kAdaptiveThreshold;
  if (name == "cross_entropy") return LossKind::kCrossEntropy;
  throw Error("unknown loss '" + std::string(name) + "'");
}

const char* LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kHingeAbl: return "hinge_abl";
    case LossKind::kAdaptiveThreshold: return "atl";
    case LossKind::kCrossEntropy: return "cross_entropy";
  }
  return "?";
}

bool IsMultiLabel(LossKind kind) { return kind != LossKind::kCrossEntropy; }

Var HingeAblLoss(Var logits, std::span<const uint32_t> positives, double gamma) {
  CheckVector(logits, "HingeAblLoss");
  const Tensor& p = logits.value();
  const size_t slots = p.size();
  std::vector<bool> positive = PositiveMask(slots, positives);
  size_t n_pos = 0;
  for (size_t r = 1; r < slots; ++r) n_pos += positive[r];
  const size_t n_neg = slots - 1 - n_pos;
  const double w_pos = 1.0 / std::max<size_t>(1, n_pos);
  const double w_neg = 1.0 / std::max<size_t>(1, n_neg);

  double loss = 0.0;
  // Per-slot derivative of the loss with respect to p_r.
  std::vector<double> d(slots, 0.0);
  for (size_t r = 1; r < slots; ++r) {
    if (positive[r]) {
      double h = gamma + p[0] - p[r];
      if (h > 0) {
        loss += w_pos * h;
        d[0] += w_pos;
        d[r] -= w_pos;
      }
    } else {
      double h = gamma + p[r] - p[0];
      if (h > 0) {
        loss += w_neg * h;
        d[r] += w_neg;
        d[0] -= w_neg;
      }
    }
  }
  return logits.tape().Record(Tensor::Scalar(loss), {logits},
                              [logits, d](Tape& t, const Tensor& g) {
                                Tensor& gl = t.GradSlot(logits);
                                for (size_t r = 0; r < d.size(); ++r) gl[r] += g[0] * d[r];
                              });
}

Var CrossEntropyLoss(Var logits, uint32_t gold) {
  CheckVector(logits, "CrossEntropyLoss");
  const Tensor& p = logits.value();
  if (gold >= p.size()) {
    throw Error("gold class " + std::to_string(gold) + " outside " +
                std::to_string(p.size()) + " logits");
  }
  std::vector<uint32_t> all(p.size());
  for (uint32_t r = 0; r < all.size(); ++r) all[r] = r;
  std::vector<double> prob;
  const double lse = LogSumExpOver(p, all, prob);
  return logits.tape().Record(Tensor::Scalar(lse - p[gold]), {logits},
                              [logits, prob, gold](Tape& t, const Tensor& g) {
                                Tensor& gl = t.GradSlot(logits);
                                for (size_t r = 0; r < prob.size(); ++r) {
                                  gl[r] += g[0] * (prob[r] - (r == gold ? 1.0 : 0.0));
                                }
                              });
}

Var AdaptiveThresholdLoss(Var logits, std::span<const uint32_t> positives) {
  CheckVector(logits, "AdaptiveThresholdLoss");
  const Tensor& p = logits.value();
  const size_t slots = p.size();
  std::vector<bool> positive = PositiveMask(slots, positives);
  std::vector<uint32_t> upper{0}, lower{0};
  for (uint32_t r = 1; r < slots; ++r) (positive[r] ? upper : lower).push_back(r);

  std::vector<double> d(slots, 0.0);
  double loss = 0.0;
  std::vector<double> prob;
  // Each positive against the threshold and the other positives.
  if (upper.size() > 1) {
    const double lse = LogSumExpOver(p, upper, prob);
    for (size_t i = 1; i < upper.size(); ++i) {
      loss += lse - p[upper[i]];
      for (size_t j = 0; j < upper.size(); ++j) d[upper[j]] += prob[j];
      d[upper[i]] -= 1.0;
    }
  }
  // The threshold against every negative.
  const double lse = LogSumExpOver(p, lower, prob);
  loss += lse - p[0];
  for (size_t j = 0; j < lower.size(); ++j) d[lower[j]] += prob[j];
  d[0] -= 1.0;

  return logits.tape().Record(Tensor::Scalar(loss), {logits},
                              [logits, d](Tape& t, const Tensor& g) {
                                Tensor& gl = t.GradSlot(logits);
                                for (size_t r = 0; r < d.size(); ++r) gl[r] += g[0] * d[r];
                              });
}

Var RelationLoss(LossKind kind, Var logits, std::span<const uint32_t> relations) {
  if (kind == LossKind::kCrossEntropy) {
    if (relations.size() != 1) {
      throw Error("cross-entropy needs exactly one gold relation, got " +
                  std::to_string(relations.size()));
    }
    return CrossEntropyLoss(logits, relations[0]);
  }
  std::vector<uint32_t> slots;
  for (uint32_t r : relations) slots.push_back(r + 1);
  if (kind == LossKind::kHingeAbl) return HingeAblLoss(logits, slots);
  return AdaptiveThresholdLoss(logits, slots);
}

}  // namespace kgre
