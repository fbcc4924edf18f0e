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

#include "fedtest/eval/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedtest::eval {
namespace {

double accuracy(const nn::Classifier& model, const data::LabeledDataset& ds) {
  if (ds.empty()) throw std::invalid_argument("accuracy over an empty test set");
  const auto predicted = model.predict_labels(ds.images);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (static_cast<int>(predicted[i]) == ds.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

}  // namespace

double compute_global_accuracy(const nn::Classifier& model, const data::LabeledDataset& clean_test) {
  return accuracy(model, clean_test);
}

double compute_backdoor_accuracy(const nn::Classifier& model, const data::LabeledDataset& backdoor_test) {
  return accuracy(model, backdoor_test);
}

DetectionRates compute_detection_rates(std::span<const fl::RoundRecord> records) {
  DetectionRates out;
  double fpr_sum = 0.0;
  double fnr_sum = 0.0;
  for (const auto& rec : records) {
    if (rec.status == fl::RoundStatus::kError) continue;
    std::size_t adv_flagged = 0;
    for (std::size_t id : rec.flagged) {
      if (std::find(rec.adversaries.begin(), rec.adversaries.end(), id) != rec.adversaries.end()) {
        ++adv_flagged;
      }
    }
    const std::size_t benign = rec.selected.size() - rec.adversaries.size();
    const std::size_t benign_flagged = rec.flagged.size() - adv_flagged;
    if (benign > 0) {
      fpr_sum += static_cast<double>(benign_flagged) / static_cast<double>(benign);
      ++out.fpr_rounds;
    }
    if (!rec.adversaries.empty()) {
      fnr_sum += static_cast<double>(rec.adversaries.size() - adv_flagged) /
                 static_cast<double>(rec.adversaries.size());
      ++out.fnr_rounds;
    }
  }
  if (out.fpr_rounds > 0) out.mean_fpr = fpr_sum / static_cast<double>(out.fpr_rounds);
  if (out.fnr_rounds > 0) out.mean_fnr = fnr_sum / static_cast<double>(out.fnr_rounds);
  return out;
}

ConvergedMax max_ba_after_convergence(std::span<const double> ga, std::span<const double> ba,
                                      double threshold) {
  if (ga.empty()) throw std::invalid_argument("empty accuracy history");
  if (ga.size() != ba.size()) throw std::invalid_argument("GA and BA series differ in length");
  ConvergedMax out;
  const auto first = std::find_if(ga.begin(), ga.end(), [&](double g) { return g >= threshold; });
  out.converged = first != ga.end();
  out.from_index = out.converged ? static_cast<std::size_t>(first - ga.begin()) : 0;
  out.value = *std::max_element(ba.begin() + static_cast<long>(out.from_index), ba.end());
  return out;
}

std::string to_string(ThresholdSource source) {
  switch (source) {
    case ThresholdSource::kExplicit: return "explicit";
    case ThresholdSource::kBaseline: return "baseline";
    case ThresholdSource::kSelfFallback: return "self_fallback";
  }
  return "?";
}

MetricsSummary summarize(std::span<const fl::RoundRecord> records, const ThresholdSpec& threshold,
                         std::size_t ba_from_round) {
  MetricsSummary s;
  s.rounds = records.size();
  s.ba_from_round = ba_from_round;
  for (const auto& rec : records) {
    if (rec.status == fl::RoundStatus::kSkipped) ++s.skipped_rounds;
    if (rec.status == fl::RoundStatus::kError) ++s.error_rounds;
    if (rec.global_accuracy && rec.backdoor_accuracy) {
      s.round_series.push_back(rec.round);
      s.ga_series.push_back(*rec.global_accuracy);
      s.ba_series.push_back(*rec.backdoor_accuracy);
    }
  }
  s.detection = compute_detection_rates(records);
  if (s.ga_series.empty()) return s;

  s.final_ga = s.ga_series.back();
  double ba_sum = 0.0;
  std::size_t ba_count = 0;
  for (std::size_t i = 0; i < s.ba_series.size(); ++i) {
    if (s.round_series[i] >= ba_from_round) {
      ba_sum += s.ba_series[i];
      ++ba_count;
    }
  }
  s.mean_ba = ba_count > 0 ? ba_sum / static_cast<double>(ba_count) : 0.0;

  if (threshold.threshold) {
    s.convergence_threshold = *threshold.threshold;
    s.threshold_source = ThresholdSource::kExplicit;
  } else if (threshold.baseline_final_ga) {
    s.convergence_threshold = threshold.baseline_ratio * *threshold.baseline_final_ga;
    s.threshold_source = ThresholdSource::kBaseline;
  } else {
    s.convergence_threshold = threshold.baseline_ratio * s.final_ga;
    s.threshold_source = ThresholdSource::kSelfFallback;
  }
  const auto m = max_ba_after_convergence(s.ga_series, s.ba_series, s.convergence_threshold);
  s.max_ba_after_convergence = m.value;
  s.converged = m.converged;
  return s;
}

}  // namespace fedtest::eval
