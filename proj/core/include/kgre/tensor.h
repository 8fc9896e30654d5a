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

#ifndef KGRE_TENSOR_H_
#define KGRE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kgre {

using Shape = std::vector<size_t>;

std::string ShapeToString(const Shape& shape);
size_t ShapeSize(const Shape& shape);

// Dense row-major buffer of doubles. Rank 0 is a scalar, rank 1 a vector and
// rank 2 a matrix; higher ranks are used only for parameter blocks.
class Tensor {
 public:
  Tensor() : shape_{0} {}
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Scalar(double value) { return Tensor(Shape{}, {value}); }
  static Tensor Vector(std::vector<double> values);
  static Tensor Matrix(size_t rows, size_t cols, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Matrix view: rank 0 and 1 are a single row; rank > 2 folds the trailing
  // extents into columns.
  size_t rows() const;
  size_t cols() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> row(size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols(), cols()};
  }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  double& at(size_t r, size_t c) { return data_[r * cols() + c]; }
  double at(size_t r, size_t c) const { return data_[r * cols() + c]; }

  // Same buffer, new shape with equal element count.
  Tensor Reshaped(Shape shape) const;
  Tensor Row(size_t r) const;

  void Fill(double value);
  // this += scale * other, element-wise; shapes must hold the same count.
  void AddScaled(const Tensor& other, double scale = 1.0);

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Plain (non-recorded) numerics shared by the differentiable kernels and the
// frozen text-side features.

// Component-wise log-sum-exp over the rows of a matrix, max-shifted.
Tensor LogSumExpRows(const Tensor& rows);

// Each row divided by its sum; zero rows stay zero.
Tensor NormalizeRows(const Tensor& m);

}  // namespace kgre

#endif  // KGRE_TENSOR_H_
