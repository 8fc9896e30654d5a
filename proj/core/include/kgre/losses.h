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

#ifndef KGRE_LOSSES_H_
#define KGRE_LOSSES_H_

#include <cstdint>
#include <span>
#include <string_view>

#include "kgre/tape.h"

namespace kgre {

enum class LossKind { kHingeAbl, kAdaptiveThreshold, kCrossEntropy };

LossKind ParseLossKind(std::string_view name);
const char* LossKindName(LossKind kind);
// Multi-label losses expect a threshold slot at logit index 0.
bool IsMultiLabel(LossKind kind);

// Balanced adaptive-threshold hinge. `positives` are logit slots (never 0):
//   mean_{r in P} max(0, gamma + p_0 - p_r) + mean_{r in N} max(0, gamma + p_r - p_0)
// with empty means taken as 0.
Var HingeAblLoss(Var logits, std::span<const uint32_t> positives, double gamma = 1.0);

// -log softmax(p)[gold], max-shifted.
Var CrossEntropyLoss(Var logits, uint32_t gold);

// Adaptive-threshold cross-entropy: positives ranked above slot 0 and slot 0
// ranked above every negative.
Var AdaptiveThresholdLoss(Var logits, std::span<const uint32_t> positives);

// Dispatch on relation indices into R. Multi-label kinds shift them by one
// to skip the threshold slot; cross-entropy needs exactly one relation.
Var RelationLoss(LossKind kind, Var logits, std::span<const uint32_t> relations);

}  // namespace kgre

#endif  // KGRE_LOSSES_H_
