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

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "kgre/document.h"
#include "kgre/error.h"

namespace kgre {

void ValidateDocument(const DocumentInstance& doc, size_t relation_count) {
  const size_t n = doc.entities.size();
  if (doc.links.size() != n) throw Error(doc.id + ": link table size mismatch");
  for (const Mention& m : doc.mentions) {
    if (m.entity >= n) throw Error(doc.id + ": mention of undeclared entity");
    if (m.window >= doc.windows.size()) {
      throw Error(doc.id + ": mention refers to missing window " + std::to_string(m.window));
    }
    if (m.marker >= doc.windows[m.window].tokens()) {
      throw Error(doc.id + ": marker position " + std::to_string(m.marker) +
                  " outside its window");
    }
  }
  for (const LabeledPair& p : doc.pairs) {
    if (p.subject >= n || p.object >= n) throw Error(doc.id + ": pair of undeclared entity");
    for (uint32_t r : p.relations) {
      if (r >= relation_count) throw Error(doc.id + ": relation index out of range");
    }
  }
  for (const EncoderOutput& w : doc.windows) ValidateEncoderOutput(w);
}

namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

uint32_t ParseIndex(const std::string& s, size_t line_no) {
  try {
    size_t used = 0;
    unsigned long v = std::stoul(s, &used);
    if (used != s.size() || v > UINT32_MAX) throw std::invalid_argument(s);
    return static_cast<uint32_t>(v);
  } catch (const std::exception&) {
    throw ParseError("expected a non-negative integer, got '" + s + "'", line_no);
  }
}

}  // namespace

std::vector<DocumentRecord> ParseDocumentFile(std::istream& in) {
  std::vector<DocumentRecord> docs;
  std::optional<DocumentRecord> cur;
  std::string line;
  size_t line_no = 0;
  auto need = [&](const std::vector<std::string>& f, size_t n) {
    if (f.size() != n) {
      throw ParseError("'" + f[0] + "' expects " + std::to_string(n - 1) + " fields", line_no);
    }
    if (!cur && f[0] != "doc") throw ParseError("'" + f[0] + "' outside a doc block", line_no);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = SplitFields(line);
    if (f.empty()) continue;
    const std::string& key = f[0];
    if (key == "doc") {
      need(f, 2);
      if (cur) throw ParseError("nested doc block", line_no);
      cur.emplace();
      cur->id = f[1];
    } else if (key == "window") {
      need(f, 2);
      cur->windows.push_back(f[1]);
    } else if (key == "entity") {
      need(f, 3);
      cur->entities.push_back({f[1], f[2] == "-" ? "" : f[2]});
    } else if (key == "mention") {
      need(f, 4);
      cur->mentions.push_back({f[1], ParseIndex(f[2], line_no), ParseIndex(f[3], line_no)});
    } else if (key == "pair") {
      need(f, 4);
      DocumentRecord::PairRecord p{f[1], f[2], {}};
      if (f[3] != "-") {
        std::stringstream ss(f[3]);
        std::string r;
        while (std::getline(ss, r, ',')) {
          if (r.empty()) throw ParseError("empty relation in pair labels", line_no);
          p.relations.push_back(r);
        }
      }
      cur->pairs.push_back(std::move(p));
    } else if (key == "relation_export") {
      need(f, 3);
      cur->relation_exports.emplace_back(f[1], f[2]);
    } else if (key == "end") {
      need(f, 1);
      docs.push_back(std::move(*cur));
      cur.reset();
    } else {
      throw ParseError("unknown record '" + key + "'", line_no);
    }
  }
  if (cur) throw ParseError("unterminated doc block '" + cur->id + "'", line_no);
  return docs;
}

void WriteDocumentFile(std::ostream& out, std::span<const DocumentRecord> docs) {
  out << "# kgre documents v1\n";
  for (const DocumentRecord& d : docs) {
    out << "doc " << d.id << '\n';
    for (const auto& w : d.windows) out << "window " << w << '\n';
    for (const auto& e : d.entities) {
      out << "entity " << e.name << ' ' << (e.link.empty() ? "-" : e.link) << '\n';
    }
    for (const auto& m : d.mentions) {
      out << "mention " << m.entity << ' ' << m.window << ' ' << m.marker << '\n';
    }
    for (const auto& p : d.pairs) {
      out << "pair " << p.subject << ' ' << p.object << ' ';
      if (p.relations.empty()) out << '-';
      for (size_t i = 0; i < p.relations.size(); ++i) {
        out << (i ? "," : "") << p.relations[i];
      }
      out << '\n';
    }
    for (const auto& [rel, path] : d.relation_exports) {
      out << "relation_export " << rel << ' ' << path << '\n';
    }
    out << "end\n";
  }
}

DocumentInstance ResolveDocument(const DocumentRecord& record,
                                 const std::filesystem::path& base_dir,
                                 const KnowledgeGraph& graph,
                                 std::span<const RelationMeta> relations) {
  DocumentInstance doc;
  doc.id = record.id;
  std::unordered_map<std::string, uint32_t> entity_index;
  for (const auto& e : record.entities) {
    if (!entity_index.emplace(e.name, doc.entities.size()).second) {
      throw Error(record.id + ": duplicate entity " + e.name);
    }
    doc.entities.push_back(e.name);
    doc.links.push_back(e.link.empty() ? std::nullopt : graph.entities().Find(e.link));
  }
  std::unordered_map<std::string, uint32_t> relation_index;
  for (size_t i = 0; i < relations.size(); ++i) {
    relation_index.emplace(relations[i].id, static_cast<uint32_t>(i));
  }
  auto entity = [&](const std::string& name) {
    auto it = entity_index.find(name);
    if (it == entity_index.end()) throw Error(record.id + ": unknown entity " + name);
    return it->second;
  };
  auto relation = [&](const std::string& name) {
    auto it = relation_index.find(name);
    if (it == relation_index.end()) throw Error(record.id + ": unknown relation " + name);
    return it->second;
  };
  for (const auto& w : record.windows) {
    doc.windows.push_back(ReadEncoderOutputFile((base_dir / w).string()));
  }
  for (const auto& m : record.mentions) {
    doc.mentions.push_back({entity(m.entity), m.window, m.marker});
  }
  for (const auto& p : record.pairs) {
    LabeledPair pair{entity(p.subject), entity(p.object), {}};
    for (const auto& r : p.relations) pair.relations.push_back(relation(r));
    doc.pairs.push_back(std::move(pair));
  }
  if (!record.relation_exports.empty()) {
    doc.relation_encodings.resize(relations.size());
    std::vector<bool> seen(relations.size(), false);
    for (const auto& [rel, path] : record.relation_exports) {
      const uint32_t r = relation(rel);
      doc.relation_encodings[r] = ReadEncoderOutputFile((base_dir / path).string());
      seen[r] = true;
    }
    for (size_t r = 0; r < seen.size(); ++r) {
      if (!seen[r]) {
        throw Error(record.id + ": missing relation export for " + relations[r].id);
      }
    }
  }
  ValidateDocument(doc, relations.size());
  return doc;
}

std::vector<DocumentInstance> LoadDocuments(const std::filesystem::path& file,
                                            const KnowledgeGraph& graph,
                                            std::span<const RelationMeta> relations) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open document file: " + file.string());
  const auto records = ParseDocumentFile(in);
  std::vector<DocumentInstance> docs;
  docs.reserve(records.size());
  for (const auto& r : records) {
    docs.push_back(ResolveDocument(r, file.parent_path(), graph, relations));
  }
  return docs;
}

}  // namespace kgre
