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

#include <string>
#include <vector>

#include <json.hpp>

#include "fedtest/defense/difftest.hpp"

namespace fedtest::defense {

enum class MadVariant { kTwoStep, kSingle, kDouble };

std::string to_string(MadVariant variant);
MadVariant mad_variant_from_string(const std::string& s);

/// Every intermediate of an outlier decision, kept for audit logs.
/// `outliers` holds column positions (agents) of the score matrix.
struct DetectionReport {
  MadVariant variant = MadVariant::kTwoStep;
  std::vector<std::size_t> agent_ids;
  std::vector<double> mean_scores;  // p
  double median = 0.0;              // m_p
  std::vector<double> abs_deviations;  // q
  double mad1 = 0.0;
  /// Two-step: weighted second MAD. Double MAD: the right-side MAD
  /// (mad1 then holds the left-side MAD). Single MAD: equal to mad1.
  double mad2 = 0.0;
  std::vector<double> normalized;  // r; +inf marks a zero-MAD flag, NaN a non-flag
  double cutoff = 3.0;
  std::vector<std::size_t> outliers;

  std::vector<std::size_t> outlier_ids() const;
};

/// Two-step MAD over the per-agent mean scores:
///   q_i = |p_i - med(p)|, mad1 = med(q),
///   mad2 = (#{q <= mad1}/K) mad1 + (#{q > mad1}/K) med({q > mad1}),
///   r_i = q_i / mad1 if q_i <= mad1 (0 when mad1 == 0), else q_i / mad2,
/// and agent i is an outlier when r_i > cutoff. An empty {q > mad1} makes
/// mad2 = mad1.
DetectionReport two_step_mad(const ScoreMatrix& scores, double cutoff = 3.0);

/// Classic MAD, r_i = q_i / med(q). With med(q) == 0 every agent with a
/// non-zero deviation is flagged.
DetectionReport single_mad(const ScoreMatrix& scores, double cutoff = 3.0);

/// Separate MADs below and above the median. A zero side MAD gives r = 0 for
/// q = 0 and NaN (never an outlier) otherwise.
DetectionReport double_mad(const ScoreMatrix& scores, double cutoff = 3.0);

DetectionReport detect_outliers(const ScoreMatrix& scores, MadVariant variant, double cutoff);

/// The same detectors on a plain mean-score vector (agent ids 0..K-1).
DetectionReport detect_outliers(const std::vector<double>& mean_scores, MadVariant variant,
                                double cutoff);

nlohmann::json to_json(const DetectionReport& report);

}  // namespace fedtest::defense
