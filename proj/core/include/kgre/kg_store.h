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

#ifndef KGRE_KG_STORE_H_
#define KGRE_KG_STORE_H_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kgre {

using EntityId = uint32_t;
using RelationId = uint32_t;

struct Triple {
  EntityId subject = 0;
  RelationId relation = 0;
  EntityId object = 0;

  auto operator<=>(const Triple&) const = default;
};

// Bijective string <-> dense index map; indices follow first appearance.
class Vocabulary {
 public:
  uint32_t Intern(std::string_view name);
  std::optional<uint32_t> Find(std::string_view name) const;
  const std::string& Name(uint32_t id) const { return names_.at(id); }
  size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, uint32_t> ids_;
};

enum class Direction { kOut, kIn, kBoth };

// Immutable triple store with out/in adjacency. Safe for concurrent reads.
class KnowledgeGraph {
 public:
  class Builder {
   public:
    // Returns false when the triple was already present.
    bool Add(std::string_view subject, std::string_view relation,
             std::string_view object);
    // Registers an entity with no triples (e.g. an isolated node).
    EntityId AddEntity(std::string_view name) { return entities_.Intern(name); }
    KnowledgeGraph Build() &&;

   private:
    friend class KnowledgeGraph;
    Vocabulary entities_;
    Vocabulary relations_;
    std::vector<Triple> triples_;
    struct TripleHash {
      size_t operator()(const Triple& t) const;
    };
    std::unordered_set<Triple, TripleHash> seen_;
  };

  KnowledgeGraph() = default;

  // Tab-separated subject/relation/object lines; "#" lines and blank lines
  // are skipped. Duplicate triples collapse to one.
  static KnowledgeGraph Load(std::istream& in);
  static KnowledgeGraph LoadFile(const std::string& path);

  // Adds (o, r + |R_G|, s) for every (s, r, o). Throws if already applied.
  KnowledgeGraph WithInverseRelations() const;

  const Vocabulary& entities() const { return entities_; }
  const Vocabulary& relations() const { return relations_; }
  std::span<const Triple> triples() const { return triples_; }
  size_t entity_count() const { return entities_.size(); }
  size_t relation_count() const { return relations_.size(); }

  bool has_inverses() const { return has_inverses_; }
  // |R_G| before inverse augmentation.
  size_t base_relation_count() const {
    return has_inverses_ ? relations_.size() / 2 : relations_.size();
  }
  bool IsInverse(RelationId r) const {
    return has_inverses_ && r >= base_relation_count();
  }
  RelationId Inverse(RelationId r) const;

  // Triple indices incident to node, in insertion order.
  std::span<const uint32_t> OutEdges(EntityId node) const;
  std::span<const uint32_t> InEdges(EntityId node) const;
  // Triple indices with the given relation, in insertion order.
  std::span<const uint32_t> RelationEdges(RelationId r) const;

  // Triples whose relevant endpoint equals node. kBoth lists a self-loop
  // once and merges the two lists in insertion order.
  std::vector<Triple> EdgesOf(EntityId node, Direction direction) const;

  bool Contains(const Triple& t) const;

 private:
  void Index();
  void CheckNode(EntityId node) const;

  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> triples_;
  bool has_inverses_ = false;
  // CSR adjacency: offsets_[v]..offsets_[v+1] into the edge arrays.
  std::vector<uint32_t> out_offsets_, out_edges_;
  std::vector<uint32_t> in_offsets_, in_edges_;
  std::vector<uint32_t> rel_offsets_, rel_edges_;
};

// Writes the graph back in the triple file format.
void WriteTriples(std::ostream& out, const KnowledgeGraph& graph);

// A relation of the extraction set R with its label and description.
struct RelationMeta {
  std::string id;
  std::string label;
  std::string description;
};

// id<TAB>label[<TAB>description] per line; "#" lines skipped. Ids must be
// unique and labels non-empty.
std::vector<RelationMeta> LoadRelationMeta(std::istream& in);
std::vector<RelationMeta> LoadRelationMetaFile(const std::string& path);
void WriteRelationMeta(std::ostream& out, std::span<const RelationMeta> relations);

}  // namespace kgre

#endif  // KGRE_KG_STORE_H_
