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

#ifndef KGRE_TESTS_SUPPORT_FIXTURES_H_
#define KGRE_TESTS_SUPPORT_FIXTURES_H_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kgre/config.h"
#include "kgre/experiment.h"
#include "kgre/kg_store.h"
#include "kgre/rng.h"
#include "kgre/synth.h"

namespace kgre::testing {

inline KnowledgeGraph GraphFromText(const std::string& text) {
  std::istringstream in(text);
  return KnowledgeGraph::Load(in);
}

// Random multigraph with a few hubs so that small caps bind.
inline KnowledgeGraph RandomGraph(Rng& rng, size_t nodes, size_t triples, size_t relations,
                                  size_t hubs = 3) {
  KnowledgeGraph::Builder b;
  for (size_t i = 0; i < nodes; ++i) b.AddEntity("n" + std::to_string(i));
  for (size_t i = 0; i < triples; ++i) {
    size_t s = rng.Below(nodes), o = rng.Below(nodes);
    if (hubs > 0 && rng.Bernoulli(0.4)) {
      if (rng.Bernoulli(0.5)) {
        s = rng.Below(hubs);
      } else {
        o = rng.Below(hubs);
      }
    }
    b.Add("n" + std::to_string(s), "r" + std::to_string(rng.Below(relations)),
          "n" + std::to_string(o));
  }
  return std::move(b).Build();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("kgre_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes a synthetic fixture into `dir` and parses its train.cfg with the
// given key=value overrides applied. Output paths point inside `dir`.
inline ExperimentConfig FixtureConfig(const std::string& kind, const std::filesystem::path& dir,
                                      const std::vector<std::string>& overrides = {},
                                      uint64_t synth_seed = 1) {
  SynthOptions opts;
  opts.kind = kind;
  opts.seed = synth_seed;
  GenerateFixture(opts, dir);
  Config config = Config::LoadFile(dir / "train.cfg");
  for (const std::string& a : overrides) config.SetAssignment(a);
  return ParseExperimentConfig(config);
}

}  // namespace kgre::testing

#endif  // KGRE_TESTS_SUPPORT_FIXTURES_H_
