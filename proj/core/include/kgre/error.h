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

#ifndef KGRE_ERROR_H_
#define KGRE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgre {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Operand shapes that a kernel cannot combine.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgre

#endif  // KGRE_ERROR_H_
