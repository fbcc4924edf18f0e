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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedtest/agg/robust.hpp"
#include "fedtest/data/dataset.hpp"
#include "fedtest/defense/difftest.hpp"
#include "fedtest/defense/outlier.hpp"
#include "fedtest/nn/classifier.hpp"
#include "fedtest/param_vector.hpp"
#include "fedtest/train/local_training.hpp"

namespace fedtest::fl {

/// round(beta * N) with halves rounded up.
std::size_t participant_count(std::size_t total_agents, double participation);

struct GlobalState {
  std::size_t round = 0;
  ParamVector params;
  double eta = 1.0;
  std::size_t total_agents = 1;
  double participation = 1.0;

  std::size_t participants() const { return participant_count(total_agents, participation); }
  /// Throws std::invalid_argument on N < 1, beta outside (0,1], eta <= 0 or
  /// K outside [1, N].
  void validate() const;
};

/// Fresh state at round 0 with eta defaulting to 1 / beta.
GlobalState make_initial_state(ParamVector params, std::size_t total_agents, double participation,
                               std::optional<double> eta = std::nullopt);

enum class AggregationMethod { kFedAvg, kMultiKrum, kCoomed, kDefense };

std::string to_string(AggregationMethod method);
AggregationMethod aggregation_method_from_string(const std::string& s);

enum class RoundStatus { kOk, kSkipped, kError };

std::string to_string(RoundStatus status);
RoundStatus round_status_from_string(const std::string& s);

/// Raised by filtered_aggregate when every update is flagged.
class NoInliers : public std::runtime_error {
 public:
  NoInliers() : std::runtime_error("no inliers: every selected agent was flagged") {}
};

/// K distinct agent ids in ascending order, drawn uniformly without
/// replacement from a stream keyed by (seed, round).
std::vector<std::size_t> select_agents(const GlobalState& state, std::uint64_t seed);

/// G + (eta / N) * sum(updates).
ParamVector fedavg_aggregate(const GlobalState& state, std::span<const ParamVector> updates);

/// FedAvg restricted to the non-flagged updates, rescaled so the averaging
/// denominator is the inlier count: G + (eta / N) * (|updates| / |inliers|) *
/// sum(inliers). With outliers empty this is fedavg_aggregate; with eta = 1 /
/// beta it is the plain inlier mean.
ParamVector filtered_aggregate(const GlobalState& state, const std::map<std::size_t, ParamVector>& updates,
                               const std::set<std::size_t>& outliers);

struct Agent {
  std::size_t id = 0;
  bool adversary = false;
  data::LabeledDataset data;
};

struct DefenseSettings {
  defense::DiffTestConfig difftest;
  defense::MadVariant variant = defense::MadVariant::kTwoStep;
  double cutoff = 3.0;
  data::LabeledDataset validation_seeds;
  bool keep_generated = false;
};

/// Everything run_round reads besides the global state. Pointers are
/// non-owning and must outlive the call.
struct RoundContext {
  std::shared_ptr<const nn::Architecture> architecture;
  std::span<const Agent> agents;
  train::TrainingHyper hyper;
  train::AttackConfig attack;
  const data::LabeledDataset* semantic_source = nullptr;
  AggregationMethod method = AggregationMethod::kFedAvg;
  DefenseSettings defense;
  double krum_norm_order = 2.0;
  std::size_t krum_selected = 0;  // 0: K - b
  const data::LabeledDataset* clean_test = nullptr;
  const data::LabeledDataset* backdoor_test = nullptr;
  std::uint64_t master_seed = 0;
};

/// Per seed class: which selected agents landed in the minority cluster and
/// the projected points (rows follow RoundRecord::selected).
struct ClassDiagnostics {
  int class_id = 0;
  std::vector<std::size_t> minority_ids;
  std::vector<std::vector<double>> points;
  bool degenerate = false;
};

struct RoundRecord {
  std::size_t round = 0;
  RoundStatus status = RoundStatus::kOk;
  std::optional<std::string> error;
  AggregationMethod method = AggregationMethod::kFedAvg;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> adversaries;  // selected adversaries
  std::vector<std::size_t> flagged;      // subset of selected
  std::optional<double> global_accuracy;
  std::optional<double> backdoor_accuracy;
  std::optional<defense::DetectionReport> detection;
  std::vector<ClassDiagnostics> classes;
  std::vector<std::string> warnings;
  /// Differential inputs of the round (kept only on request; not persisted
  /// with the record).
  std::optional<data::LabeledDataset> generated;
};

struct RoundOutcome {
  GlobalState state;
  RoundRecord record;
};

/// One global epoch: select, train locally (adversaries poison and scale),
/// optionally detect, aggregate, evaluate. Any error leaves G unchanged and
/// yields an error-tagged record; the round index always advances.
RoundOutcome run_round(const GlobalState& state, const RoundContext& context);

}  // namespace fedtest::fl
