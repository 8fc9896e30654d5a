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

#include "kgre/checkpoint.h"

#include <fstream>

#include "binary_io.h"
#include "kgre/error.h"

namespace kgre {

const std::string* Checkpoint::Find(const std::string& key) const {
  for (const auto& [k, v] : config) {
    if (k == key) return &v;
  }
  return nullptr;
}

void WriteCheckpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write("KGCK", 4);
  binary::PutU32(out, kCheckpointVersion);
  binary::PutU32(out, static_cast<uint32_t>(ckpt.config.size()));
  for (const auto& [key, value] : ckpt.config) {
    binary::PutString(out, key);
    binary::PutString(out, value);
  }
  binary::PutU32(out, static_cast<uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, tensor] : ckpt.tensors) {
    binary::PutString(out, name);
    binary::PutU32(out, static_cast<uint32_t>(tensor.rank()));
    for (size_t extent : tensor.shape()) binary::PutU32(out, static_cast<uint32_t>(extent));
    for (double v : tensor.values()) binary::PutF32(out, static_cast<float>(v));
  }
  if (!out) throw Error("failed writing checkpoint");
}

Checkpoint ReadCheckpoint(std::istream& in) {
  binary::ExpectMagic(in, "KGCK", "checkpoint");
  const uint32_t version = binary::GetU32(in, "checkpoint version");
  if (version != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  const uint32_t entries = binary::GetU32(in, "checkpoint config count");
  for (uint32_t i = 0; i < entries; ++i) {
    std::string key = binary::GetString(in, "checkpoint config key");
    std::string value = binary::GetString(in, "checkpoint config value");
    ckpt.config.emplace_back(std::move(key), std::move(value));
  }
  const uint32_t count = binary::GetU32(in, "checkpoint tensor count");
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = binary::GetString(in, "tensor name");
    const uint32_t rank = binary::GetU32(in, "tensor rank");
    if (rank > 8) throw Error("implausible rank for tensor " + name);
    Shape shape(rank);
    size_t size = 1;
    for (uint32_t k = 0; k < rank; ++k) {
      shape[k] = binary::GetU32(in, "tensor extent");
      size *= shape[k];
      if (size > (size_t{1} << 32)) throw Error("implausible size for tensor " + name);
    }
    Tensor t(shape);
    for (double& v : t.values()) v = binary::GetF32(in, "tensor payload");
    ckpt.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ckpt;
}

void WriteCheckpointFile(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint: " + path);
  WriteCheckpoint(out, ckpt);
}

Checkpoint ReadCheckpointFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  return ReadCheckpoint(in);
}

Checkpoint MakeCheckpoint(const ParameterStore& store,
                          std::vector<std::pair<std::string, std::string>> config) {
  Checkpoint ckpt;
  ckpt.config = std::move(config);
  for (size_t i = 0; i < store.size(); ++i) {
    ckpt.tensors.emplace_back(store[i].name, store[i].value);
  }
  return ckpt;
}

void LoadParameters(ParameterStore& store, const Checkpoint& ckpt) {
  if (ckpt.tensors.size() != store.size()) {
    throw Error("checkpoint has " + std::to_string(ckpt.tensors.size()) +
                " tensors, model has " + std::to_string(store.size()));
  }
  for (const auto& [name, tensor] : ckpt.tensors) {
    Parameter* p = store.Find(name);
    if (!p) throw Error("checkpoint tensor " + name + " has no model parameter");
    if (p->value.shape() != tensor.shape()) {
      throw ShapeError("checkpoint tensor " + name + " has shape " +
                       ShapeToString(tensor.shape()) + ", model expects " +
                       ShapeToString(p->value.shape()));
    }
    p->value = tensor;
  }
}

}  // namespace kgre
