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

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "fedtest/tensor.hpp"

namespace fedtest::data {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Images in [0,1] with shape (n, channels, H, W) and integer labels in
/// [0, num_classes).
struct LabeledDataset {
  Tensor images;
  std::vector<int> labels;
  std::size_t num_classes = 0;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  Shape image_shape() const { return images.shape(); }

  /// Throws DataError when sizes disagree or a label is out of range.
  void validate() const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;
  /// Indices of every sample whose label equals `label`.
  std::vector<std::size_t> indices_of(int label) const;
};

LabeledDataset make_dataset(Shape shape, std::size_t num_classes);

/// Binary layout, all little-endian:
///   int32 n, int32 channels, int32 H, int32 W,
///   float32 pixels[n * channels * H * W]  (row-major n,c,h,w),
///   int32 labels[n].
/// The class count is not stored; readers take it from the caller or from
/// the largest label.
void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds);
LabeledDataset read_dataset(const std::filesystem::path& path, std::size_t num_classes = 0);

/// A dataset directory holds train.bin, test.bin and optionally
/// semantic_ids.txt (whitespace separated train-set indices of semantic
/// backdoor carriers).
struct DatasetBundle {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> semantic_ids;
};

DatasetBundle load_dataset_dir(const std::filesystem::path& dir);
void save_dataset_dir(const std::filesystem::path& dir, const DatasetBundle& bundle);

}  // namespace fedtest::data
