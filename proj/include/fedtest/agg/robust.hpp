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

#include <span>
#include <vector>

#include "fedtest/param_vector.hpp"

namespace fedtest::agg {

/// Multi-Krum settings. `selected_count` of 0 means K - b.
struct KrumConfig {
  std::size_t assumed_adversaries = 0;
  std::size_t selected_count = 0;
  double norm_order = 2.0;

  /// Throws std::invalid_argument unless K >= 2b + 3, 1 <= l <= K and p >= 1.
  void validate(std::size_t num_updates) const;
  std::size_t effective_selected(std::size_t num_updates) const;
};

/// Minkowski distance of order p.
double distance(const ParamVector& a, const ParamVector& b, double p);

/// S(d_i) = sum of the distances from d_i to its K - b - 2 nearest other
/// updates (ties between equally distant neighbours go to the lower index).
std::vector<double> krum_scores(std::span<const ParamVector> updates, const KrumConfig& config);

/// Indices of the l lowest-scoring updates; equal scores prefer the lower
/// index.
std::vector<std::size_t> krum_select(std::span<const ParamVector> updates, const KrumConfig& config);

/// global + mean of the l lowest-scoring updates.
ParamVector multi_krum_aggregate(const ParamVector& global, std::span<const ParamVector> updates,
                                 const KrumConfig& config);

/// Per-coordinate median of the updates (mean of the central pair for an
/// even count).
ParamVector coordinate_median(std::span<const ParamVector> updates);

/// global + coordinate_median(updates).
ParamVector coomed_aggregate(const ParamVector& global, std::span<const ParamVector> updates);

}  // namespace fedtest::agg
