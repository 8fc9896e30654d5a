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

#include "kgre/config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

#include "kgre/error.h"

namespace kgre {
namespace {

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool ValidKey(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

}  // namespace

Config Config::Parse(std::istream& in, std::filesystem::path base_dir) {
  Config config;
  config.base_dir_ = std::move(base_dir);
  std::string line;
  std::string section;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = Trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError("unterminated section header", line_no);
      section = Trim(std::string_view(text).substr(1, text.size() - 2));
      if (!ValidKey(section)) throw ParseError("bad section name '" + section + "'", line_no);
      continue;
    }
    const size_t eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = Trim(std::string_view(text).substr(0, eq));
    const std::string value = Trim(std::string_view(text).substr(eq + 1));
    if (!ValidKey(key)) throw ParseError("bad key '" + key + "'", line_no);
    const std::string full = section.empty() ? key : section + "." + key;
    if (!config.values_.emplace(full, value).second) {
      throw ParseError("duplicate key '" + full + "'", line_no);
    }
  }
  return config;
}

Config Config::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path.string());
  return Parse(in, path.parent_path());
}

void Config::Set(const std::string& key, const std::string& value) {
  if (!ValidKey(key)) throw Error("bad config key '" + key + "'");
  values_[key] = value;
}

void Config::SetAssignment(std::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error("expected key=value, got '" + std::string(assignment) + "'");
  }
  Set(Trim(assignment.substr(0, eq)), Trim(assignment.substr(eq + 1)));
}

std::string Config::GetString(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::GetDouble(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("config key " + key + ": expected a number, got '" + s + "'");
  }
  return v;
}

int64_t Config::GetInt(const std::string& key, int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("config key " + key + ": expected an integer, got '" + s + "'");
  }
  return v;
}

uint64_t Config::GetUnsigned(const std::string& key, uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("config key " + key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool Config::GetBool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error("config key " + key + ": expected a boolean, got '" + s + "'");
}

std::filesystem::path Config::GetPath(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) return {};
  std::filesystem::path p(it->second);
  return p.is_absolute() ? p : base_dir_ / p;
}

void Config::CheckKeys(std::span<const std::string_view> known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error("unknown config key '" + key + "'");
    }
  }
}

}  // namespace kgre
