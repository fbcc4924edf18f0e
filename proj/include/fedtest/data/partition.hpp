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

#include <cstdint>
#include <span>
#include <vector>

#include "fedtest/data/dataset.hpp"

namespace fedtest::data {

/// Per-agent index lists over a parent dataset. Lists are pairwise disjoint
/// and together cover the partitioned pool.
struct PartitionPlan {
  std::vector<std::vector<std::size_t>> agent_indices;
  double dirichlet_alpha = 0.0;
};

/// Non-iid split: for every class a proportion vector over the N agents is
/// drawn from Dirichlet(alpha * 1) and that class's (shuffled) samples are
/// handed out by largest-remainder rounding of the proportions.
PartitionPlan dirichlet_partition(const LabeledDataset& dataset, std::size_t num_agents,
                                  double alpha, std::uint64_t seed);

/// Same, restricted to the samples listed in `pool`.
PartitionPlan dirichlet_partition(const LabeledDataset& dataset, std::span<const std::size_t> pool,
                                  std::size_t num_agents, double alpha, std::uint64_t seed);

/// Integer allocation of `total` items proportional to `weights` (which need
/// not be normalized); remainders go to the largest fractional parts, ties to
/// the lower index.
std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total);

}  // namespace fedtest::data
