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

#ifndef KGRE_OPS_H_
#define KGRE_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "kgre/tape.h"

// Differentiable kernels. Every function records its result on the tape of
// its first operand and registers the matching backward rule. Shape errors
// name both operand shapes.
namespace kgre::ops {

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double factor);
// a [n x d] plus a bias row b [d] broadcast over rows.
Var AddBias(Var a, Var b);

// a [n x k] times b [k x m].
Var MatMul(Var a, Var b);
// x [n x in] (or [in]) times weight [out x in] transposed, plus optional
// bias [out]. Pass an invalid Var to skip the bias.
Var Linear(Var x, Var weight, Var bias);

Var Relu(Var a);
Var Tanh(Var a);

// Divides every row by its sum.
Var RowNormalize(Var a);

// Column-wise concatenation. Rank <= 1 inputs give a vector.
Var ConcatCols(std::span<const Var> parts);
// Row-wise concatenation of matrices with equal column counts.
Var ConcatRows(std::span<const Var> parts);

Var GatherRows(Var a, std::span<const uint32_t> rows);
// Row r of a as a rank-1 vector.
Var SelectRow(Var a, size_t r);
// out[index[e]] += a[e]; out has `rows` rows.
Var ScatterAddRows(Var a, std::span<const uint32_t> index, size_t rows);

Var Reshape(Var a, Shape shape);
Var Sum(Var a);

// Component-wise log-sum-exp over the rows of a [n x d] -> [d].
Var LogSumExpPool(Var a);

// Per-destination [mean | max | min | std] over messages [E x d] grouped by
// destination -> [nodes x 4d]. Population std; an empty group yields zeros.
Var PnaAggregate(Var messages, std::span<const uint32_t> destination,
                 size_t nodes);

// score_r = sum over blocks b of s_b^T W[b, r] o_b with s, o of width d and
// weight of shape [d/k, R, k, k]. k = d is the full bilinear form.
Var GroupedBilinear(Var s, Var o, Var weight, size_t block_size);

}  // namespace kgre::ops

#endif  // KGRE_OPS_H_
