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

#include "kgre/encoder_export.h"

#include <fstream>

#include "binary_io.h"
#include "kgre/error.h"

namespace kgre {

void ValidateEncoderOutput(const EncoderOutput& enc) {
  if (enc.hidden.rank() != 2 || enc.hidden.rows() == 0) {
    throw Error("encoder output needs N > 0 token encodings");
  }
  const size_t n = enc.hidden.rows();
  if (enc.attention.shape() != Shape{n, n}) {
    throw ShapeError("attention " + ShapeToString(enc.attention.shape()) +
                     " does not match hidden " + ShapeToString(enc.hidden.shape()));
  }
  for (double a : enc.attention.values()) {
    if (!(a >= 0.0)) throw Error("attention entries must be non-negative");
  }
}

void WriteEncoderOutput(std::ostream& out, const EncoderOutput& enc) {
  ValidateEncoderOutput(enc);
  out.write("EOUT", 4);
  binary::PutU32(out, kEncoderExportVersion);
  binary::PutU32(out, static_cast<uint32_t>(enc.tokens()));
  binary::PutU32(out, static_cast<uint32_t>(enc.width()));
  binary::PutU32(out, enc.offset);
  for (double v : enc.hidden.values()) binary::PutF32(out, static_cast<float>(v));
  for (double v : enc.attention.values()) binary::PutF32(out, static_cast<float>(v));
}

EncoderOutput ReadEncoderOutput(std::istream& in) {
  binary::ExpectMagic(in, "EOUT", "encoder export");
  const uint32_t version = binary::GetU32(in, "encoder export version");
  if (version != kEncoderExportVersion) {
    throw Error("unsupported encoder export version " + std::to_string(version));
  }
  const uint32_t n = binary::GetU32(in, "token count");
  const uint32_t d = binary::GetU32(in, "hidden width");
  EncoderOutput enc;
  enc.offset = binary::GetU32(in, "window offset");
  if (n == 0 || d == 0 || n > (1u << 16) || d > (1u << 16)) {
    throw Error("implausible encoder export dimensions");
  }
  enc.hidden = Tensor(Shape{n, d});
  for (double& v : enc.hidden.values()) v = binary::GetF32(in, "hidden states");
  enc.attention = Tensor(Shape{n, n});
  for (double& v : enc.attention.values()) v = binary::GetF32(in, "attention");
  ValidateEncoderOutput(enc);
  return enc;
}

void WriteEncoderOutputFile(const std::string& path, const EncoderOutput& enc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write encoder export: " + path);
  WriteEncoderOutput(out, enc);
}

EncoderOutput ReadEncoderOutputFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open encoder export: " + path);
  return ReadEncoderOutput(in);
}

}  // namespace kgre
