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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fedtest {

/// Per-sample shape in (channels, height, width) order. Flat feature
/// vectors use (features, 1, 1).
struct Shape {
  std::size_t channels = 0;
  std::size_t height = 1;
  std::size_t width = 1;

  std::size_t volume() const { return channels * height * width; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense batch of samples, row-major (n, c, h, w).
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t batch, Shape shape, double fill = 0.0)
      : batch_(batch), shape_(shape), data_(batch * shape.volume(), fill) {}
  Tensor(std::size_t batch, Shape shape, std::vector<double> data);

  std::size_t batch() const { return batch_; }
  const Shape& shape() const { return shape_; }
  std::size_t sample_size() const { return shape_.volume(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> sample(std::size_t i) {
    return std::span<double>(data_).subspan(i * sample_size(), sample_size());
  }
  std::span<const double> sample(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * sample_size(), sample_size());
  }

  double& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[((n * shape_.channels + c) * shape_.height + h) * shape_.width + w];
  }
  double at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[((n * shape_.channels + c) * shape_.height + h) * shape_.width + w];
  }

  void fill(double v);
  bool operator==(const Tensor&) const = default;

 private:
  std::size_t batch_ = 0;
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace fedtest
