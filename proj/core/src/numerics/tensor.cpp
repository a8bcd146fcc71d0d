// Copyright 2026 The oarlab Authors
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

#include "oar/numerics/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "oar/common/error.hpp"

namespace oar::numerics {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

std::string to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      out += ",";
    }
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  require(element_count(shape_) == data_.size(),
          "tensor shape " + to_string(shape_) + " does not match " + std::to_string(data_.size()) + " elements");
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }

Tensor Tensor::vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

std::size_t Tensor::dim(std::size_t axis) const {
  require(axis < shape_.size(), "axis out of range");
  return shape_[axis];
}

std::size_t Tensor::rows() const {
  if (shape_.size() == 2) {
    return shape_[0];
  }
  return 1;
}

std::size_t Tensor::cols() const {
  if (shape_.size() == 2) {
    return shape_[1];
  }
  return data_.size();
}

std::span<double> Tensor::row(std::size_t r) { return std::span<double>(data_).subspan(r * cols(), cols()); }

std::span<const double> Tensor::row(std::size_t r) const {
  return std::span<const double>(data_).subspan(r * cols(), cols());
}

double Tensor::item() const {
  require(data_.size() == 1, "item() on tensor with " + std::to_string(data_.size()) + " elements");
  return data_[0];
}

std::span<double> Tensor::grad() {
  require(has_grad(), "tensor has no gradient buffer");
  return grad_;
}

std::span<const double> Tensor::grad() const {
  require(has_grad(), "tensor has no gradient buffer");
  return grad_;
}

void Tensor::zero_grad() {
  grad_.assign(data_.size(), 0.0);
}

}  // namespace oar::numerics
