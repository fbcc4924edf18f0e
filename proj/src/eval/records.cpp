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

#include "fedtest/eval/records.hpp"

#include <cmath>
#include <fstream>

#include "fedtest/data/dataset.hpp"

namespace fedtest::eval {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

json to_json(const fl::RoundRecord& r) {
  json classes = json::array();
  for (const auto& c : r.classes) {
    classes.push_back({{"class_id", c.class_id},
                       {"degenerate", c.degenerate},
                       {"minority_ids", c.minority_ids},
                       {"points", c.points}});
  }
  json j{{"schema_version", kRecordSchemaVersion},
         {"round", r.round},
         {"status", fl::to_string(r.status)},
         {"error", r.error ? json(*r.error) : json(nullptr)},
         {"aggregation_method", fl::to_string(r.method)},
         {"selected_agent_ids", r.selected},
         {"adversary_ids_selected", r.adversaries},
         {"flagged_outliers", r.flagged},
         {"global_accuracy", optional_number(r.global_accuracy)},
         {"backdoor_accuracy", optional_number(r.backdoor_accuracy)},
         {"detection", r.detection ? defense::to_json(*r.detection) : json(nullptr)},
         {"classes", classes},
         {"warnings", r.warnings}};
  return j;
}

fl::RoundRecord round_from_json(const json& j) {
  if (j.value("schema_version", -1) != kRecordSchemaVersion) {
    throw data::DataError("record schema version mismatch (expected " +
                          std::to_string(kRecordSchemaVersion) + ")");
  }
  fl::RoundRecord r;
  try {
    r.round = j.at("round").get<std::size_t>();
    r.status = fl::round_status_from_string(j.at("status").get<std::string>());
    if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
    r.method = fl::aggregation_method_from_string(j.at("aggregation_method").get<std::string>());
    r.selected = j.at("selected_agent_ids").get<std::vector<std::size_t>>();
    r.adversaries = j.at("adversary_ids_selected").get<std::vector<std::size_t>>();
    r.flagged = j.at("flagged_outliers").get<std::vector<std::size_t>>();
    r.global_accuracy = number_or_null(j, "global_accuracy");
    r.backdoor_accuracy = number_or_null(j, "backdoor_accuracy");
    for (const auto& c : j.at("classes")) {
      fl::ClassDiagnostics d;
      d.class_id = c.at("class_id").get<int>();
      d.degenerate = c.at("degenerate").get<bool>();
      d.minority_ids = c.at("minority_ids").get<std::vector<std::size_t>>();
      d.points = c.at("points").get<std::vector<std::vector<double>>>();
      r.classes.push_back(std::move(d));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw data::DataError(std::string("malformed round record: ") + e.what());
  }
  return r;
}

json to_json(const MetricsSummary& s) {
  return json{{"schema_version", kRecordSchemaVersion},
              {"rounds", s.rounds},
              {"skipped_rounds", s.skipped_rounds},
              {"error_rounds", s.error_rounds},
              {"final_ga", s.final_ga},
              {"mean_ba", s.mean_ba},
              {"ba_from_round", s.ba_from_round},
              {"max_ba_after_convergence", s.max_ba_after_convergence},
              {"converged", s.converged},
              {"convergence_threshold", s.convergence_threshold},
              {"threshold_source", to_string(s.threshold_source)},
              {"mean_fpr", s.detection.mean_fpr ? json(*s.detection.mean_fpr) : json("NA")},
              {"mean_fnr", s.detection.mean_fnr ? json(*s.detection.mean_fnr) : json("NA")},
              {"fpr_rounds", s.detection.fpr_rounds},
              {"fnr_rounds", s.detection.fnr_rounds},
              {"round_series", s.round_series},
              {"ga_series", s.ga_series},
              {"ba_series", s.ba_series}};
}

json summary_document(const MetricsSummary& summary, bool completed,
                      const std::optional<std::string>& error) {
  auto j = to_json(summary);
  j["completed"] = completed;
  j["partial"] = !completed;
  j["error"] = error ? json(*error) : json(nullptr);
  return j;
}

void append_record(std::ostream& out, const fl::RoundRecord& record) {
  out << to_json(record).dump() << '\n';
  out.flush();
}

std::vector<fl::RoundRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data::DataError("cannot open " + path.string());
  std::vector<fl::RoundRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(round_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw data::DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw data::DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data::DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw data::DataError(path.string() + ": " + e.what());
  }
}

}  // namespace fedtest::eval
