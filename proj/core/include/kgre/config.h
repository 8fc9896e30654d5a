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

#ifndef KGRE_CONFIG_H_
#define KGRE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace kgre {

// Line-based `key = value` settings with `[section]` headers. A key inside a
// section is stored as "section.key". "#" starts a comment line. Relative
// paths are resolved against the directory of the file.
class Config {
 public:
  Config() = default;

  static Config Parse(std::istream& in, std::filesystem::path base_dir = {});
  static Config LoadFile(const std::filesystem::path& path);

  // Override one key (flags and --set assignments).
  void Set(const std::string& key, const std::string& value);
  // Parses "key=value".
  void SetAssignment(std::string_view assignment);

  bool Has(const std::string& key) const { return values_.contains(key); }
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  int64_t GetInt(const std::string& key, int64_t fallback) const;
  uint64_t GetUnsigned(const std::string& key, uint64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  // Empty when the key is unset.
  std::filesystem::path GetPath(const std::string& key) const;

  // Throws naming the first key not in `known`.
  void CheckKeys(std::span<const std::string_view> known) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

}  // namespace kgre

#endif  // KGRE_CONFIG_H_
