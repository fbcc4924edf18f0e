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
#include <optional>
#include <string>

#include "fedtest/data/backdoor.hpp"
#include "fedtest/data/dataset.hpp"
#include "fedtest/nn/classifier.hpp"
#include "fedtest/param_vector.hpp"

namespace fedtest::train {

struct TrainingHyper {
  std::size_t local_epochs = 3;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::size_t batch_size = 64;

  void validate() const;
};

/// Distance used for the anomaly-evasion term that keeps an attacker close
/// to the prior global model.
enum class AnchorMetric { kSquaredL2, kL2 };

std::string to_string(AnchorMetric metric);
AnchorMetric anchor_metric_from_string(const std::string& s);

/// Attacker objective and post-processing:
///   loss = alpha * CE(mixed clean + backdoor batch) + (1 - alpha) * dist(w, prior_global)
/// followed by scaling the update by gamma / colluders.
struct AttackConfig {
  double alpha = 0.7;
  data::BackdoorSpec backdoor;
  /// Weight-scaling factor; non-positive means "use N / eta".
  double scaling_gamma = 0.0;
  AnchorMetric anchor = AnchorMetric::kSquaredL2;
};

struct TrainReport {
  ParamVector update;  // local weights minus the starting global weights
  std::size_t steps = 0;
  std::optional<std::string> warning;
};

/// SGD with momentum and weight decay for `local_epochs` passes over the
/// shuffled local data. `model` holds the current global weights and is
/// not modified.
TrainReport train_benign(const nn::Classifier& model, const data::LabeledDataset& local_data,
                         const TrainingHyper& hyper, std::uint64_t seed);

/// Like train_benign, but every batch is poisoned with poison_batch and the
/// loss carries the anchor term toward `prior_global`. Semantic attacks read
/// their carriers from `semantic_source`.
TrainReport train_adversarial(const nn::Classifier& model, const data::LabeledDataset& local_data,
                              const AttackConfig& attack, const ParamVector& prior_global,
                              const TrainingHyper& hyper, std::uint64_t seed,
                              const data::LabeledDataset* semantic_source = nullptr);

/// (gamma / colluders) * update.
ParamVector scale_update(const ParamVector& update, double gamma, std::size_t colluders);

/// Mean cross-entropy of `model` over a dataset.
double mean_cross_entropy(const nn::Classifier& model, const data::LabeledDataset& dataset);

}  // namespace fedtest::train
