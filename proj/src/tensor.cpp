// Copyright 2026 The Fedtest Authors.
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

#include "fedtest/tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace fedtest {

std::string Shape::str() const {
  return "(" + std::to_string(channels) + "," + std::to_string(height) + "," +
         std::to_string(width) + ")";
}

Tensor::Tensor(std::size_t batch, Shape shape, std::vector<double> data)
    : batch_(batch), shape_(shape), data_(std::move(data)) {
  if (data_.size() != batch_ * shape_.volume()) {
    throw std::invalid_argument("tensor data size does not match batch x " + shape_.str());
  }
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace fedtest
