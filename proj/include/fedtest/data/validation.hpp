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
#include <vector>

#include "fedtest/data/dataset.hpp"

namespace fedtest::data {

/// The server's fixed set of validation images used as seeds for
/// differential testing. `num_classes_used` classes are picked uniformly
/// without replacement, `count` images are spread evenly over them (the
/// remainder going to randomly ordered classes) and drawn uniformly inside
/// each class. The same seed always yields the same set, so callers sample
/// once and reuse it every round.
LabeledDataset sample_validation_seeds(const LabeledDataset& dataset, std::size_t count,
                                       std::size_t num_classes_used, std::uint64_t seed);

/// The indices behind sample_validation_seeds (with-replacement draws from
/// short classes may repeat an index).
std::vector<std::size_t> sample_validation_indices(const LabeledDataset& dataset, std::size_t count,
                                                   std::size_t num_classes_used, std::uint64_t seed);

}  // namespace fedtest::data
