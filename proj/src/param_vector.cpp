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

#include "fedtest/param_vector.hpp"

#include <cmath>
#include <utility>

namespace fedtest {

ParamVector::ParamVector(std::string layout_id, std::size_t size, double fill)
    : layout_id_(std::move(layout_id)), values_(size, fill) {}

ParamVector::ParamVector(std::string layout_id, std::vector<double> values)
    : layout_id_(std::move(layout_id)), values_(std::move(values)) {}

bool ParamVector::compatible(const ParamVector& other) const {
  return layout_id_ == other.layout_id_ && values_.size() == other.values_.size();
}

void ParamVector::check_compatible(const ParamVector& other) const {
  if (layout_id_ != other.layout_id_) {
    throw LayoutMismatch("parameter layout mismatch: '" + layout_id_ + "' vs '" +
                         other.layout_id_ + "'");
  }
  if (values_.size() != other.values_.size()) {
    throw LayoutMismatch("parameter length mismatch for layout '" + layout_id_ + "'");
  }
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

ParamVector& ParamVector::add_scaled(const ParamVector& other, double factor) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += factor * other.values_[i];
  return *this;
}

double ParamVector::norm2() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double ParamVector::squared_distance(const ParamVector& other) const {
  check_compatible(other);
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double d = values_[i] - other.values_[i];
    s += d * d;
  }
  return s;
}

ParamVector operator+(ParamVector lhs, const ParamVector& rhs) { return lhs += rhs; }
ParamVector operator-(ParamVector lhs, const ParamVector& rhs) { return lhs -= rhs; }
ParamVector operator*(double factor, ParamVector v) { return v *= factor; }

}  // namespace fedtest
