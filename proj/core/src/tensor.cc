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

#include "kgre/tensor.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgre/error.h"

namespace kgre {

std::string ShapeToString(const Shape& shape) {
  std::string out = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

size_t ShapeSize(const Shape& shape) {
  size_t n = 1;
  for (size_t e : shape) n *= e;
  return n;
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(ShapeSize(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != ShapeSize(shape_)) {
    throw ShapeError("tensor of shape " + ShapeToString(shape_) + " given " +
                     std::to_string(data_.size()) + " values");
  }
}

Tensor Tensor::Vector(std::vector<double> values) {
  const size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::Matrix(size_t rows, size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

size_t Tensor::rows() const {
  if (shape_.size() < 2) return 1;
  return shape_[0];
}

size_t Tensor::cols() const {
  if (shape_.empty()) return 1;
  if (shape_.size() == 1) return shape_[0];
  size_t c = 1;
  for (size_t i = 1; i < shape_.size(); ++i) c *= shape_[i];
  return c;
}

Tensor Tensor::Reshaped(Shape shape) const {
  if (ShapeSize(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + ShapeToString(shape_) + " to " +
                     ShapeToString(shape));
  }
  return Tensor(std::move(shape), data_);
}

Tensor Tensor::Row(size_t r) const {
  auto span = row(r);
  return Tensor::Vector({span.begin(), span.end()});
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Tensor::AddScaled(const Tensor& other, double scale) {
  if (other.size() != size()) {
    throw ShapeError("AddScaled: " + ShapeToString(shape_) + " vs " +
                     ShapeToString(other.shape_));
  }
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

Tensor LogSumExpRows(const Tensor& rows) {
  const size_t n = rows.rows(), d = rows.cols();
  if (n == 0) throw Error("logsumexp over an empty set");
  Tensor out(Shape{d});
  for (size_t j = 0; j < d; ++j) {
    double mx = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) mx = std::max(mx, rows.at(i, j));
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += std::exp(rows.at(i, j) - mx);
    out[j] = mx + std::log(acc);
  }
  return out;
}

Tensor NormalizeRows(const Tensor& m) {
  Tensor out = m;
  const size_t n = m.rows(), d = m.cols();
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) s += m.at(i, j);
    if (s == 0.0) continue;
    for (size_t j = 0; j < d; ++j) out.at(i, j) = m.at(i, j) / s;
  }
  return out;
}

}  // namespace kgre
