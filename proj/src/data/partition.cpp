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

#include "fedtest/data/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fedtest/rng.hpp"

namespace fedtest::data {

std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(sum > 0.0)) throw std::invalid_argument("largest_remainder: no mass");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> frac(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / sum * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    frac[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  // Floating-point floors can overshoot by one in pathological cases.
  while (assigned > total) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % order.size()]];
  return counts;
}

PartitionPlan dirichlet_partition(const LabeledDataset& dataset, std::size_t num_agents,
                                  double alpha, std::uint64_t seed) {
  std::vector<std::size_t> pool(dataset.size());
  std::iota(pool.begin(), pool.end(), 0);
  return dirichlet_partition(dataset, pool, num_agents, alpha, seed);
}

PartitionPlan dirichlet_partition(const LabeledDataset& dataset, std::span<const std::size_t> pool,
                                  std::size_t num_agents, double alpha, std::uint64_t seed) {
  if (num_agents < 1) throw std::invalid_argument("dirichlet_partition: need at least one agent");
  if (!(alpha > 0.0)) throw std::invalid_argument("dirichlet_partition: alpha must be positive");

  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
  for (std::size_t idx : pool) {
    if (idx >= dataset.size()) throw std::invalid_argument("dirichlet_partition: index out of range");
    by_class[static_cast<std::size_t>(dataset.labels[idx])].push_back(idx);
  }
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].empty()) {
      throw std::invalid_argument("dirichlet_partition: class " + std::to_string(c) +
                                  " has no samples");
    }
  }

  PartitionPlan plan;
  plan.dirichlet_alpha = alpha;
  plan.agent_indices.resize(num_agents);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    Rng rng = make_rng(seed, Stream::kPartition, {c});
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> props(num_agents);
    double sum = 0.0;
    for (double& p : props) {
      p = gamma(rng);
      sum += p;
    }
    if (!(sum > 0.0)) {
      // Tiny alpha can underflow every draw; the limit puts all mass on one agent.
      std::uniform_int_distribution<std::size_t> pick(0, num_agents - 1);
      props.assign(num_agents, 0.0);
      props[pick(rng)] = 1.0;
    }
    auto& members = by_class[c];
    std::shuffle(members.begin(), members.end(), rng);
    const auto counts = largest_remainder(props, members.size());
    std::size_t pos = 0;
    for (std::size_t a = 0; a < num_agents; ++a) {
      auto& dst = plan.agent_indices[a];
      dst.insert(dst.end(), members.begin() + static_cast<long>(pos),
                 members.begin() + static_cast<long>(pos + counts[a]));
      pos += counts[a];
    }
  }
  for (auto& list : plan.agent_indices) std::sort(list.begin(), list.end());
  return plan;
}

}  // namespace fedtest::data
