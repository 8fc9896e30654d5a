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

#ifndef KGRE_ENCODER_EXPORT_H_
#define KGRE_ENCODER_EXPORT_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "kgre/tensor.h"

namespace kgre {

// Frozen output of an external encoder for one window of text: token
// encodings and the layer/head-averaged attention matrix.
struct EncoderOutput {
  uint32_t offset = 0;  // first token of this window in the full document
  Tensor hidden;        // [N x d]
  Tensor attention;     // [N x N], non-negative rows

  size_t tokens() const { return hidden.empty() ? 0 : hidden.rows(); }
  size_t width() const { return hidden.cols(); }
};

// Throws unless N > 0, the shapes agree and attention is non-negative.
void ValidateEncoderOutput(const EncoderOutput& out);

// Binary export, little-endian: "EOUT", u32 version (1), u32 N, u32 d,
// u32 offset, N*d float32 hidden (row-major), N*N float32 attention.
inline constexpr uint32_t kEncoderExportVersion = 1;

void WriteEncoderOutput(std::ostream& out, const EncoderOutput& enc);
EncoderOutput ReadEncoderOutput(std::istream& in);
void WriteEncoderOutputFile(const std::string& path, const EncoderOutput& enc);
EncoderOutput ReadEncoderOutputFile(const std::string& path);

}  // namespace kgre

#endif  // KGRE_ENCODER_EXPORT_H_
