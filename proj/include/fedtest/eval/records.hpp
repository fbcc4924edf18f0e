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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedtest/eval/metrics.hpp"
#include "fedtest/fl/core.hpp"

namespace fedtest::eval {

inline constexpr int kRecordSchemaVersion = 1;

nlohmann::json to_json(const fl::RoundRecord& record);
/// Inverse of to_json for the persisted fields (detection details are
/// restored as far as the summary needs them: ids and flags).
fl::RoundRecord round_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MetricsSummary& summary);

/// summary.json: the summary plus completion markers.
nlohmann::json summary_document(const MetricsSummary& summary, bool completed,
                                const std::optional<std::string>& error);

/// Appends one compact JSON line and flushes.
void append_record(std::ostream& out, const fl::RoundRecord& record);

/// Reads a records.jsonl file. Throws DataError on schema mismatch.
std::vector<fl::RoundRecord> read_records(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace fedtest::eval
