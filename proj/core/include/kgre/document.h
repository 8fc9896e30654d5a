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

#ifndef KGRE_DOCUMENT_H_
#define KGRE_DOCUMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgre/encoder_export.h"
#include "kgre/kg_store.h"

namespace kgre {

struct Mention {
  uint32_t entity = 0;  // document-local entity index
  uint32_t window = 0;
  uint32_t marker = 0;  // position of the left-side marker token in its window
};

struct LabeledPair {
  uint32_t subject = 0;
  uint32_t object = 0;
  std::vector<uint32_t> relations;  // indices into R; empty = no relation
};

// One example: frozen encoder windows, mentions, KG links and labeled pairs.
// Graph-only examples have no windows; zero-shot examples carry one encoder
// export per relation of R.
struct DocumentInstance {
  std::string id;
  std::vector<EncoderOutput> windows;
  std::vector<std::string> entities;
  std::vector<std::optional<EntityId>> links;
  std::vector<Mention> mentions;
  std::vector<LabeledPair> pairs;
  std::vector<EncoderOutput> relation_encodings;
};

// Throws unless every mention and pair references declared entities and
// markers fall inside their windows.
void ValidateDocument(const DocumentInstance& doc, size_t relation_count);

// Sidecar document file, before exports are loaded and names resolved.
//
//   doc <id>
//   window <export path>
//   entity <name> <kg entity | ->
//   mention <entity> <window> <marker>
//   pair <subject> <object> <relation[,relation...] | ->
//   relation_export <relation> <export path>
//   end
//
// Fields are separated by single spaces or tabs; "#" lines are comments.
// Paths are relative to the document file's directory.
struct DocumentRecord {
  struct Entity {
    std::string name;
    std::string link;  // empty when unlinked
  };
  struct MentionRecord {
    std::string entity;
    uint32_t window = 0;
    uint32_t marker = 0;
  };
  struct PairRecord {
    std::string subject;
    std::string object;
    std::vector<std::string> relations;
  };

  std::string id;
  std::vector<std::string> windows;
  std::vector<Entity> entities;
  std::vector<MentionRecord> mentions;
  std::vector<PairRecord> pairs;
  std::vector<std::pair<std::string, std::string>> relation_exports;
};

std::vector<DocumentRecord> ParseDocumentFile(std::istream& in);
void WriteDocumentFile(std::ostream& out, std::span<const DocumentRecord> docs);

// Loads exports and resolves entity links against the graph (names missing
// from the graph stay unlinked) and relation ids against R.
DocumentInstance ResolveDocument(const DocumentRecord& record,
                                 const std::filesystem::path& base_dir,
                                 const KnowledgeGraph& graph,
                                 std::span<const RelationMeta> relations);

std::vector<DocumentInstance> LoadDocuments(const std::filesystem::path& file,
                                            const KnowledgeGraph& graph,
                                            std::span<const RelationMeta> relations);

}  // namespace kgre

#endif  // KGRE_DOCUMENT_H_
