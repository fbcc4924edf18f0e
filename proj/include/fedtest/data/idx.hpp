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

#include "fedtest/data/dataset.hpp"

namespace fedtest::data {

/// Reads an IDX image file (magic 0x00000803, unsigned bytes, big-endian
/// header) and its IDX label file (magic 0x00000801) as used by MNIST-style
/// public datasets. Pixels are scaled to [0,1].
LabeledDataset read_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                        std::size_t num_classes = 10);

}  // namespace fedtest::data
