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

#include "kgre/kg_store.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "kgre/error.h"
#include "kgre/rng.h"

namespace kgre {

uint32_t Vocabulary::Intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  const uint32_t id = static_cast<uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<uint32_t> Vocabulary::Find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

size_t KnowledgeGraph::Builder::TripleHash::operator()(const Triple& t) const {
  return Mix64((uint64_t{t.subject} << 32) ^ Mix64(uint64_t{t.relation} << 32 | t.object));
}

bool KnowledgeGraph::Builder::Add(std::string_view subject, std::string_view relation,
                                  std::string_view object) {
  Triple t{entities_.Intern(subject), relations_.Intern(relation),
           entities_.Intern(object)};
  if (!seen_.insert(t).second) return false;
  triples_.push_back(t);
  return true;
}

KnowledgeGraph KnowledgeGraph::Builder::Build() && {
  KnowledgeGraph g;
  g.entities_ = std::move(entities_);
  g.relations_ = std::move(relations_);
  g.triples_ = std::move(triples_);
  g.Index();
  return g;
}

KnowledgeGraph KnowledgeGraph::Load(std::istream& in) {
  Builder builder;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string_view view(line);
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
      size_t tab = view.find('\t', start);
      fields.push_back(view.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError("expected 3 tab-separated fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::string_view f : fields) {
      if (f.empty()) throw ParseError("empty field in triple", line_no);
    }
    builder.Add(fields[0], fields[1], fields[2]);
  }
  return std::move(builder).Build();
}

KnowledgeGraph KnowledgeGraph::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open triple file: " + path);
  return Load(in);
}

KnowledgeGraph KnowledgeGraph::WithInverseRelations() const {
  if (has_inverses_) throw Error("inverse relations were already added");
  KnowledgeGraph g;
  g.entities_ = entities_;
  g.relations_ = relations_;
  const uint32_t base = static_cast<uint32_t>(relations_.size());
  for (uint32_t r = 0; r < base; ++r) g.relations_.Intern(relations_.Name(r) + "^-1");
  if (g.relations_.size() != 2 * base) {
    throw Error("inverse relation names collide with existing relation names");
  }
  g.triples_ = triples_;
  g.triples_.reserve(2 * triples_.size());
  for (const Triple& t : triples_) {
    g.triples_.push_back(Triple{t.object, t.relation + base, t.subject});
  }
  g.has_inverses_ = true;
  g.Index();
  return g;
}

RelationId KnowledgeGraph::Inverse(RelationId r) const {
  if (!has_inverses_) throw Error("graph has no inverse relations");
  const RelationId base = static_cast<RelationId>(base_relation_count());
  return r < base ? r + base : r - base;
}

namespace {

void BuildCsr(size_t n, std::span<const Triple> triples,
              uint32_t (*key)(const Triple&), std::vector<uint32_t>& offsets,
              std::vector<uint32_t>& edges) {
  offsets.assign(n + 1, 0);
  for (const Triple& t : triples) ++offsets[key(t) + 1];
  for (size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
  edges.assign(triples.size(), 0);
  std::vector<uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (uint32_t i = 0; i < triples.size(); ++i) edges[cursor[key(triples[i])]++] = i;
}

}  // namespace

void KnowledgeGraph::Index() {
  BuildCsr(entities_.size(), triples_, [](const Triple& t) { return t.subject; },
           out_offsets_, out_edges_);
  BuildCsr(entities_.size(), triples_, [](const Triple& t) { return t.object; },
           in_offsets_, in_edges_);
  BuildCsr(relations_.size(), triples_, [](const Triple& t) { return t.relation; },
           rel_offsets_, rel_edges_);
}

void KnowledgeGraph::CheckNode(EntityId node) const {
  if (node >= entities_.size()) {
    throw Error("entity index " + std::to_string(node) + " out of range (" +
                std::to_string(entities_.size()) + " entities)");
  }
}

std::span<const uint32_t> KnowledgeGraph::OutEdges(EntityId node) const {
  CheckNode(node);
  return std::span<const uint32_t>(out_edges_).subspan(
      out_offsets_[node], out_offsets_[node + 1] - out_offsets_[node]);
}

std::span<const uint32_t> KnowledgeGraph::InEdges(EntityId node) const {
  CheckNode(node);
  return std::span<const uint32_t>(in_edges_).subspan(
      in_offsets_[node], in_offsets_[node + 1] - in_offsets_[node]);
}

std::span<const uint32_t> KnowledgeGraph::RelationEdges(RelationId r) const {
  if (r >= relations_.size()) throw Error("relation index out of range");
  return std::span<const uint32_t>(rel_edges_).subspan(
      rel_offsets_[r], rel_offsets_[r + 1] - rel_offsets_[r]);
}

std::vector<Triple> KnowledgeGraph::EdgesOf(EntityId node, Direction direction) const {
  std::vector<uint32_t> ids;
  if (direction != Direction::kIn) {
    auto out = OutEdges(node);
    ids.insert(ids.end(), out.begin(), out.end());
  }
  if (direction != Direction::kOut) {
    for (uint32_t i : InEdges(node)) {
      if (direction == Direction::kBoth && triples_[i].subject == node) continue;
      ids.push_back(i);
    }
  }
  std::sort(ids.begin(), ids.end());
  std::vector<Triple> out;
  out.reserve(ids.size());
  for (uint32_t i : ids) out.push_back(triples_[i]);
  return out;
}

bool KnowledgeGraph::Contains(const Triple& t) const {
  if (t.subject >= entities_.size()) return false;
  for (uint32_t i : OutEdges(t.subject)) {
    if (triples_[i] == t) return true;
  }
  return false;
}

void WriteTriples(std::ostream& out, const KnowledgeGraph& graph) {
  for (const Triple& t : graph.triples()) {
    out << graph.entities().Name(t.subject) << '\t'
        << graph.relations().Name(t.relation) << '\t'
        << graph.entities().Name(t.object) << '\n';
  }
}

std::vector<RelationMeta> LoadRelationMeta(std::istream& in) {
  std::vector<RelationMeta> out;
  std::unordered_set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    RelationMeta meta;
    const size_t t1 = line.find('\t');
    if (t1 == std::string::npos) throw ParseError("expected id<TAB>label", line_no);
    meta.id = line.substr(0, t1);
    const size_t t2 = line.find('\t', t1 + 1);
    meta.label = line.substr(t1 + 1, t2 == std::string::npos ? t2 : t2 - t1 - 1);
    if (t2 != std::string::npos) meta.description = line.substr(t2 + 1);
    if (meta.id.empty()) throw ParseError("empty relation id", line_no);
    if (meta.label.empty()) throw ParseError("empty relation label", line_no);
    if (!ids.insert(meta.id).second) {
      throw ParseError("duplicate relation id " + meta.id, line_no);
    }
    out.push_back(std::move(meta));
  }
  return out;
}

std::vector<RelationMeta> LoadRelationMetaFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open relation file: " + path);
  return LoadRelationMeta(in);
}

void WriteRelationMeta(std::ostream& out, std::span<const RelationMeta> relations) {
  for (const RelationMeta& r : relations) {
    out << r.id << '\t' << r.label << '\t' << r.description << '\n';
  }
}

}  // namespace kgre
