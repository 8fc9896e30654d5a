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

#ifndef KGRE_SRC_BINARY_IO_H_
#define KGRE_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "kgre/error.h"

// Little-endian primitives shared by the binary containers.
namespace kgre::binary {

inline void PutU32(std::ostream& out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

inline void PutF32(std::ostream& out, float v) { PutU32(out, std::bit_cast<uint32_t>(v)); }

inline void PutString(std::ostream& out, const std::string& s) {
  PutU32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline uint32_t GetU32(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(std::string("truncated input while reading ") + what);
  }
  return uint32_t{b[0]} | uint32_t{b[1]} << 8 | uint32_t{b[2]} << 16 | uint32_t{b[3]} << 24;
}

inline float GetF32(std::istream& in, const char* what) {
  return std::bit_cast<float>(GetU32(in, what));
}

inline std::string GetString(std::istream& in, const char* what, uint32_t limit = 1 << 20) {
  const uint32_t n = GetU32(in, what);
  if (n > limit) throw Error(std::string("implausible string length in ") + what);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) {
    throw Error(std::string("truncated input while reading ") + what);
  }
  return s;
}

inline void ExpectMagic(std::istream& in, const char (&magic)[5], const char* what) {
  char b[4];
  if (!in.read(b, 4) || std::memcmp(b, magic, 4) != 0) {
    throw Error(std::string("bad magic in ") + what);
  }
}

}  // namespace kgre::binary

#endif  // KGRE_SRC_BINARY_IO_H_
