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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedtest/data/dataset.hpp"
#include "fedtest/fl/core.hpp"
#include "fedtest/nn/classifier.hpp"

namespace fedtest::eval {

/// Fraction of argmax predictions equal to the labels. Throws on an empty set.
double compute_global_accuracy(const nn::Classifier& model, const data::LabeledDataset& clean_test);

/// Same count over a backdoor test set whose labels are the target class.
double compute_backdoor_accuracy(const nn::Classifier& model, const data::LabeledDataset& backdoor_test);

/// Mean per-round FPR (flagged benign / selected benign) and FNR (missed
/// adversaries / selected adversaries). Rounds with an empty denominator and
/// error rounds are left out; a mean over zero rounds is nullopt.
struct DetectionRates {
  std::optional<double> mean_fpr;
  std::optional<double> mean_fnr;
  std::size_t fpr_rounds = 0;
  std::size_t fnr_rounds = 0;
};

DetectionRates compute_detection_rates(std::span<const fl::RoundRecord> records);

struct ConvergedMax {
  double value = 0.0;
  /// False when GA never reached the threshold and `value` is the maximum
  /// over the whole history.
  bool converged = false;
  std::size_t from_index = 0;
};

/// Largest BA at or after the first index with GA >= threshold. Throws on
/// empty or mismatched series.
ConvergedMax max_ba_after_convergence(std::span<const double> ga, std::span<const double> ba,
                                      double threshold);

enum class ThresholdSource { kExplicit, kBaseline, kSelfFallback };

std::string to_string(ThresholdSource source);

struct ThresholdSpec {
  std::optional<double> threshold;          // absolute GA threshold
  std::optional<double> baseline_final_ga;  // threshold = ratio * this
  double baseline_ratio = 0.85;
};

struct MetricsSummary {
  std::size_t rounds = 0;
  std::size_t skipped_rounds = 0;
  std::size_t error_rounds = 0;
  double final_ga = 0.0;
  double mean_ba = 0.0;
  std::size_t ba_from_round = 0;
  double max_ba_after_convergence = 0.0;
  bool converged = false;
  double convergence_threshold = 0.0;
  ThresholdSource threshold_source = ThresholdSource::kExplicit;
  DetectionRates detection;
  std::vector<std::size_t> round_series;
  std::vector<double> ga_series;
  std::vector<double> ba_series;
};

/// Derives every summary figure from the records alone. Rounds without
/// accuracies (errors) are absent from the series. Mean BA covers rounds
/// with index >= ba_from_round.
MetricsSummary summarize(std::span<const fl::RoundRecord> records, const ThresholdSpec& threshold,
                         std::size_t ba_from_round = 0);

}  // namespace fedtest::eval
