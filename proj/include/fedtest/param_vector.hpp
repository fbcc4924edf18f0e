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
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fedtest {

/// Raised when two ParamVectors with different layouts are combined.
class LayoutMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat, ordered view of every parameter of a model. This is the unit of
/// communication between agents and the server: global weights, local
/// weights and updates are all ParamVectors tagged with the layout they
/// flatten.
class ParamVector {
 public:
  ParamVector() = default;
  ParamVector(std::string layout_id, std::size_t size, double fill = 0.0);
  ParamVector(std::string layout_id, std::vector<double> values);
  ParamVector(std::string layout_id, std::initializer_list<double> values)
      : ParamVector(std::move(layout_id), std::vector<double>(values)) {}

  const std::string& layout_id() const { return layout_id_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Throws LayoutMismatch unless `other` flattens the same layout.
  void check_compatible(const ParamVector& other) const;
  bool compatible(const ParamVector& other) const;

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double factor);
  /// this += factor * other
  ParamVector& add_scaled(const ParamVector& other, double factor);

  double norm2() const;
  double squared_distance(const ParamVector& other) const;

  bool operator==(const ParamVector& other) const = default;

 private:
  std::string layout_id_;
  std::vector<double> values_;
};

ParamVector operator+(ParamVector lhs, const ParamVector& rhs);
ParamVector operator-(ParamVector lhs, const ParamVector& rhs);
ParamVector operator*(double factor, ParamVector v);

}  // namespace fedtest
