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
#include <span>
#include <string>

#include "fedtest/eval/metrics.hpp"
#include "fedtest/fl/core.hpp"

namespace fedtest::eval {

/// GA and BA (percent) against the round index as a standalone SVG.
std::string progression_svg(const MetricsSummary& summary, const std::string& title);

/// Scatter of one seed class's projected predictions: adversaries as red
/// crosses, benign agents as blue dots, minority-cluster members circled.
/// Throws std::invalid_argument when the record has no such class.
std::string pca_scatter_svg(const fl::RoundRecord& record, std::size_t class_index);

/// Writes progress.svg and one pca_round_RRRR_class_C.svg per class of each
/// record that carries cluster diagnostics. Returns the number of files.
std::size_t write_plots(const std::filesystem::path& dir, std::span<const fl::RoundRecord> records,
                        const MetricsSummary& summary, const std::string& title);

}  // namespace fedtest::eval
