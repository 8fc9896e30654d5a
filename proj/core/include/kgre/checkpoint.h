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

#ifndef KGRE_CHECKPOINT_H_
#define KGRE_CHECKPOINT_H_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kgre/tape.h"

namespace kgre {

inline constexpr uint32_t kCheckpointVersion = 1;

// Versioned binary container: "KGCK", version, config key/values, then
// named tensors with their extents and float32 payloads (little-endian).
struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const std::string* Find(const std::string& key) const;
};

void WriteCheckpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint ReadCheckpoint(std::istream& in);
void WriteCheckpointFile(const std::string& path, const Checkpoint& ckpt);
Checkpoint ReadCheckpointFile(const std::string& path);

Checkpoint MakeCheckpoint(const ParameterStore& store,
                          std::vector<std::pair<std::string, std::string>> config);
// Copies tensors into the store. Names and shapes must match one to one.
void LoadParameters(ParameterStore& store, const Checkpoint& ckpt);

}  // namespace kgre

#endif  // KGRE_CHECKPOINT_H_
