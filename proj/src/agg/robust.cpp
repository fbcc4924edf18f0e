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

#include "fedtest/agg/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedtest::agg {
namespace {

void check_layouts(const ParamVector& global, std::span<const ParamVector> updates) {
  for (const auto& u : updates) global.check_compatible(u);
}

}  // namespace

void KrumConfig::validate(std::size_t num_updates) const {
  if (num_updates < 2 * assumed_adversaries + 3) {
    throw std::invalid_argument("krum requires K >= 2b + 3 (K=" + std::to_string(num_updates) +
                                ", b=" + std::to_string(assumed_adversaries) + ")");
  }
  const std::size_t l = effective_selected(num_updates);
  if (l < 1 || l > num_updates) throw std::invalid_argument("krum: selected count outside [1, K]");
  if (!(norm_order >= 1.0)) throw std::invalid_argument("krum: norm order must be >= 1");
}

std::size_t KrumConfig::effective_selected(std::size_t num_updates) const {
  return selected_count == 0 ? num_updates - assumed_adversaries : selected_count;
}

double distance(const ParamVector& a, const ParamVector& b, double p) {
  a.check_compatible(b);
  const auto x = a.values();
  const auto y = b.values();
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
  }
  if (p == 1.0) {
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s;
  }
  for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), p);
  return std::pow(s, 1.0 / p);
}

std::vector<double> krum_scores(std::span<const ParamVector> updates, const KrumConfig& config) {
  const std::size_t k = updates.size();
  config.validate(k);
  for (const auto& u : updates) updates.front().check_compatible(u);

  std::vector<std::vector<double>> dist(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      dist[i][j] = dist[j][i] = distance(updates[i], updates[j], config.norm_order);
    }
  }
  const std::size_t neighbours = k - config.assumed_adversaries - 2;
  std::vector<double> scores(k, 0.0);
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < k; ++i) {
    others.clear();
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) others.push_back(j);
    }
    std::stable_sort(others.begin(), others.end(),
                     [&](std::size_t a, std::size_t b) { return dist[i][a] < dist[i][b]; });
    double s = 0.0;
    for (std::size_t n = 0; n < neighbours; ++n) s += dist[i][others[n]];
    scores[i] = s;
  }
  return scores;
}

std::vector<std::size_t> krum_select(std::span<const ParamVector> updates, const KrumConfig& config) {
  const auto scores = krum_scores(updates, config);
  std::vector<std::size_t> order(updates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  order.resize(config.effective_selected(updates.size()));
  std::sort(order.begin(), order.end());
  return order;
}

ParamVector multi_krum_aggregate(const ParamVector& global, std::span<const ParamVector> updates,
                                 const KrumConfig& config) {
  if (updates.empty()) throw std::invalid_argument("multi-krum over zero updates");
  check_layouts(global, updates);
  const auto chosen = krum_select(updates, config);
  ParamVector sum(global.layout_id(), global.size());
  for (std::size_t i : chosen) sum += updates[i];
  ParamVector out = global;
  out.add_scaled(sum, 1.0 / static_cast<double>(chosen.size()));
  return out;
}

ParamVector coordinate_median(std::span<const ParamVector> updates) {
  if (updates.empty()) throw std::invalid_argument("coordinate median over zero updates");
  for (const auto& u : updates) updates.front().check_compatible(u);
  const std::size_t k = updates.size();
  ParamVector out(updates.front().layout_id(), updates.front().size());
  std::vector<double> column(k);
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < k; ++i) column[i] = updates[i][j];
    if (k % 2 == 1) {
      std::nth_element(column.begin(), column.begin() + static_cast<long>(k / 2), column.end());
      out[j] = column[k / 2];
    } else {
      std::nth_element(column.begin(), column.begin() + static_cast<long>(k / 2), column.end());
      const double hi = column[k / 2];
      const double lo = *std::max_element(column.begin(), column.begin() + static_cast<long>(k / 2));
      out[j] = 0.5 * (lo + hi);
    }
  }
  return out;
}

ParamVector coomed_aggregate(const ParamVector& global, std::span<const ParamVector> updates) {
  check_layouts(global, updates);
  return global + coordinate_median(updates);
}

}  // namespace fedtest::agg
