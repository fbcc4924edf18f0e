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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fedtest/data/dataset.hpp"
#include "fedtest/eval/config.hpp"
#include "fedtest/eval/metrics.hpp"
#include "fedtest/fl/core.hpp"

namespace fedtest::eval {

/// Data derived once per run from the bundle and the config.
struct PreparedData {
  data::BackdoorSpec backdoor;             // with semantic carrier ids filled in
  std::vector<fl::Agent> agents;
  data::LabeledDataset validation_seeds;   // drawn from the test split
  data::LabeledDataset clean_test;         // test split minus the validation seeds
  data::LabeledDataset backdoor_test;
};

/// Partitions the training pool (semantic carriers excluded) over the agents
/// with a Dirichlet split, draws the validation seeds and builds the clean
/// and backdoor test sets. Pixel-pattern test images of the target class
/// are left out of the backdoor set.
PreparedData prepare_data(const ExperimentConfig& config, const data::DatasetBundle& bundle);

/// Either the directory named by the config or the synthetic shapes set.
data::DatasetBundle load_bundle(const ExperimentConfig& config);

struct ExperimentResult {
  std::vector<fl::RoundRecord> records;
  MetricsSummary summary;
  bool completed = false;
  std::optional<std::string> error;
  ParamVector final_params;
};

struct RunOptions {
  /// When set, writes config.json, records.jsonl (one line per round, as
  /// rounds finish), summary.json and optionally diff_images/.
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const fl::RoundRecord&)> on_round;
};

/// Runs every round. A failing round stops the run; the summary then covers
/// the completed rounds and is marked partial.
ExperimentResult run_experiment(const ExperimentConfig& config, const data::DatasetBundle& bundle,
                                const RunOptions& options = {});

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

ThresholdSpec threshold_spec(const ExperimentConfig& config);

}  // namespace fedtest::eval
