// Copyright 2026 The fastrir Authors. All Rights Reserved.
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

#ifndef FASTRIR_NN_TENSOR_H_
#define FASTRIR_NN_TENSOR_H_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fastrir/error.h"

namespace fastrir::nn {

// Dense row-major tensor. Signals are (batch, channels, length); dense
// activations are (batch, features).
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, T fill = T(0))
      : shape_(std::move(shape)), data_(count(shape_), fill) {}
  Tensor(std::vector<int> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != count(shape_)) {
      throw ConfigError("tensor data does not match shape");
    }
  }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_.at(i); }
  int rank() const { return static_cast<int>(shape_.size()); }
  size_t size() const { return data_.size(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }
  std::vector<T>& vec() { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& operator[](size_t i) { return data_[i]; }
  T operator[](size_t i) const { return data_[i]; }

  // Same data, new shape with an identical element count.
  Tensor reshaped(std::vector<int> shape) const {
    if (count(shape) != data_.size()) {
      throw ConfigError("reshape changes element count");
    }
    return Tensor(std::move(shape), data_);
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  static size_t count(const std::vector<int>& shape) {
    return std::accumulate(shape.begin(), shape.end(), size_t{1},
                           std::multiplies<size_t>());
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

std::string shape_string(const std::vector<int>& shape);

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  std::vector<To> out(t.vec().begin(), t.vec().end());
  return Tensor<To>(t.shape(), std::move(out));
}

}  // namespace fastrir::nn

#endif  // FASTRIR_NN_TENSOR_H_
