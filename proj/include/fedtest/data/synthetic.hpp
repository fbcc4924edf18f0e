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

#include "fedtest/data/dataset.hpp"

namespace fedtest::data {

/// Procedural stand-in for a 28x28 grayscale, 10-class image benchmark.
/// Each class is a stroke figure (bars, diagonals, ring, disk, plus, cross,
/// square, double bar) rendered with random placement, scale, rotation,
/// stroke width and intensity, plus pixel noise and an optional faint
/// distractor stroke. Figures stay inside the central 24x24 region, so the
/// bottom-right corner is background.
struct SyntheticOptions {
  std::size_t train_size = 12000;
  std::size_t test_size = 2000;
  /// Extra training images of `semantic_source_class` drawn over a faint
  /// striped background; their ids become the semantic carriers.
  std::size_t semantic_carriers = 63;
  int semantic_source_class = 1;
  double pixel_noise = 0.06;
  std::uint64_t seed = 7;
};

constexpr std::size_t kSyntheticClasses = 10;
constexpr std::size_t kSyntheticSide = 28;

DatasetBundle make_synthetic_shapes(const SyntheticOptions& options);

}  // namespace fedtest::data
