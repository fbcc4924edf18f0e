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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedtest/data/synthetic.hpp"
#include "fedtest/defense/difftest.hpp"
#include "fedtest/defense/outlier.hpp"
#include "fedtest/fl/core.hpp"
#include "fedtest/train/local_training.hpp"

namespace fedtest::eval {

/// Declarative description of one FL run. See configs/*.json for the file
/// format; absent keys keep the defaults below and unknown keys are
/// rejected.
struct ExperimentConfig {
  std::string name = "experiment";

  /// Directory with train.bin / test.bin (and semantic_ids.txt). Empty means
  /// the procedural shapes dataset built from `synthetic`.
  std::filesystem::path dataset_dir;
  data::SyntheticOptions synthetic;
  std::string architecture = "cnn";

  std::size_t total_agents = 20;
  double participation = 0.25;
  std::optional<double> eta;  // default 1 / participation
  std::vector<std::size_t> adversary_ids{0};
  double dirichlet_alpha = 0.9;
  std::size_t rounds = 30;
  std::uint64_t master_seed = 1;

  train::TrainingHyper hyper;
  train::AttackConfig attack;

  fl::AggregationMethod method = fl::AggregationMethod::kDefense;
  double krum_norm_order = 2.0;
  std::size_t krum_selected = 0;

  defense::DiffTestConfig difftest;
  defense::MadVariant detector = defense::MadVariant::kTwoStep;
  double cutoff = 3.0;
  std::size_t validation_seeds = 20;
  std::size_t validation_classes = 10;
  bool export_diff_images = false;

  std::optional<double> convergence_threshold;
  std::optional<double> baseline_final_ga;
  std::size_t ba_from_round = 0;
  std::size_t backdoor_test_copies = 10;

  std::size_t participants() const { return fl::participant_count(total_agents, participation); }
  double effective_eta() const { return eta.value_or(1.0 / participation); }

  /// Cross-field checks that do not need the dataset. Throws
  /// std::invalid_argument naming the offending field.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace fedtest::eval
