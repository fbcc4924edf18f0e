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

#include "fedtest/defense/outlier.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fedtest/stats.hpp"

namespace fedtest::defense {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DetectionReport prepare(const std::vector<double>& p, std::vector<std::size_t> ids, MadVariant variant,
                        double cutoff) {
  if (p.empty()) throw std::invalid_argument("outlier detection over zero agents");
  if (!(cutoff > 0.0)) throw std::invalid_argument("outlier cutoff must be positive");
  DetectionReport r;
  r.variant = variant;
  r.agent_ids = std::move(ids);
  r.mean_scores = p;
  r.cutoff = cutoff;
  r.median = stats::median(p);
  r.abs_deviations.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r.abs_deviations[i] = std::abs(p[i] - r.median);
  r.normalized.assign(p.size(), 0.0);
  return r;
}

void collect(DetectionReport& r) {
  r.outliers.clear();
  for (std::size_t i = 0; i < r.normalized.size(); ++i) {
    if (r.normalized[i] > r.cutoff) r.outliers.push_back(i);  // NaN compares false
  }
}

DetectionReport run_two_step(DetectionReport r) {
  const auto& q = r.abs_deviations;
  const double k = static_cast<double>(q.size());
  r.mad1 = stats::median(q);
  std::vector<double> above;
  for (double v : q) {
    if (v > r.mad1) above.push_back(v);
  }
  if (above.empty()) {
    r.mad2 = r.mad1;
  } else {
    const double ratio = static_cast<double>(above.size()) / k;
    r.mad2 = (1.0 - ratio) * r.mad1 + ratio * stats::median(above);
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= r.mad1) {
      r.normalized[i] = r.mad1 == 0.0 ? 0.0 : q[i] / r.mad1;
    } else {
      r.normalized[i] = q[i] / r.mad2;
    }
  }
  collect(r);
  return r;
}

DetectionReport run_single(DetectionReport r) {
  const auto& q = r.abs_deviations;
  r.mad1 = stats::median(q);
  r.mad2 = r.mad1;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (r.mad1 == 0.0) {
      r.normalized[i] = q[i] == 0.0 ? 0.0 : kInf;
    } else {
      r.normalized[i] = q[i] / r.mad1;
    }
  }
  collect(r);
  return r;
}

DetectionReport run_double(DetectionReport r) {
  const auto& p = r.mean_scores;
  const auto& q = r.abs_deviations;
  std::vector<double> left, right;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= r.median) left.push_back(q[i]);
    if (p[i] >= r.median) right.push_back(q[i]);
  }
  r.mad1 = left.empty() ? 0.0 : stats::median(left);
  r.mad2 = right.empty() ? 0.0 : stats::median(right);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] == 0.0) {
      r.normalized[i] = 0.0;
      continue;
    }
    const double mad = p[i] < r.median ? r.mad1 : r.mad2;
    r.normalized[i] = mad == 0.0 ? kNaN : q[i] / mad;
  }
  collect(r);
  return r;
}

std::vector<double> row_means(const ScoreMatrix& scores) {
  std::vector<double> p(scores.agent_ids.size(), 0.0);
  const auto rows = scores.values.rows();
  if (rows == 0) return p;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < rows; ++c) s += scores.values(c, static_cast<Eigen::Index>(j));
    p[j] = s / static_cast<double>(rows);
  }
  return p;
}

DetectionReport dispatch(DetectionReport r) {
  switch (r.variant) {
    case MadVariant::kTwoStep: return run_two_step(std::move(r));
    case MadVariant::kSingle: return run_single(std::move(r));
    case MadVariant::kDouble: return run_double(std::move(r));
  }
  throw std::logic_error("unhandled MAD variant");
}

}  // namespace

std::string to_string(MadVariant variant) {
  switch (variant) {
    case MadVariant::kTwoStep: return "two_step";
    case MadVariant::kSingle: return "single";
    case MadVariant::kDouble: return "double";
  }
  return "?";
}

MadVariant mad_variant_from_string(const std::string& s) {
  if (s == "two_step") return MadVariant::kTwoStep;
  if (s == "single") return MadVariant::kSingle;
  if (s == "double") return MadVariant::kDouble;
  throw std::invalid_argument("unknown MAD variant '" + s + "'");
}

std::vector<std::size_t> DetectionReport::outlier_ids() const {
  std::vector<std::size_t> ids;
  for (std::size_t i : outliers) ids.push_back(agent_ids.empty() ? i : agent_ids[i]);
  return ids;
}

DetectionReport detect_outliers(const ScoreMatrix& scores, MadVariant variant, double cutoff) {
  return dispatch(prepare(row_means(scores), scores.agent_ids, variant, cutoff));
}

DetectionReport detect_outliers(const std::vector<double>& mean_scores, MadVariant variant,
                                double cutoff) {
  std::vector<std::size_t> ids(mean_scores.size());
  std::iota(ids.begin(), ids.end(), 0);
  return dispatch(prepare(mean_scores, std::move(ids), variant, cutoff));
}

DetectionReport two_step_mad(const ScoreMatrix& scores, double cutoff) {
  return detect_outliers(scores, MadVariant::kTwoStep, cutoff);
}

DetectionReport single_mad(const ScoreMatrix& scores, double cutoff) {
  return detect_outliers(scores, MadVariant::kSingle, cutoff);
}

DetectionReport double_mad(const ScoreMatrix& scores, double cutoff) {
  return detect_outliers(scores, MadVariant::kDouble, cutoff);
}

nlohmann::json to_json(const DetectionReport& report) {
  auto finite_or_null = [](const std::vector<double>& xs) {
    nlohmann::json arr = nlohmann::json::array();
    for (double v : xs) {
      if (std::isfinite(v)) {
        arr.push_back(v);
      } else if (std::isnan(v)) {
        arr.push_back("nan");
      } else {
        arr.push_back(v > 0 ? "inf" : "-inf");
      }
    }
    return arr;
  };
  return nlohmann::json{{"variant", to_string(report.variant)},
                        {"agent_ids", report.agent_ids},
                        {"mean_scores", report.mean_scores},
                        {"median", report.median},
                        {"abs_deviations", report.abs_deviations},
                        {"mad1", report.mad1},
                        {"mad2", report.mad2},
                        {"normalized", finite_or_null(report.normalized)},
                        {"cutoff", report.cutoff},
                        {"outlier_ids", report.outlier_ids()}};
}

}  // namespace fedtest::defense
