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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedtest/data/dataset.hpp"

namespace fedtest::data {

enum class BackdoorKind { kPixelPattern, kSemantic };

std::string to_string(BackdoorKind kind);
BackdoorKind backdoor_kind_from_string(const std::string& s);

/// What the attacker injects and how much of each batch it poisons.
///
/// Semantic carriers are train-set sample ids held only by adversaries; the
/// first `semantic_split.first` of them are used for training, the rest are
/// held out for the backdoor test set.
struct BackdoorSpec {
  BackdoorKind kind = BackdoorKind::kPixelPattern;
  int target_class = 0;
  std::size_t trigger_size = 4;
  std::size_t poison_per_batch = 20;
  double noise_sigma = 0.01;
  std::vector<std::size_t> semantic_sample_ids;
  std::pair<std::size_t, std::size_t> semantic_split{48, 15};

  std::span<const std::size_t> semantic_train_ids() const;
  std::span<const std::size_t> semantic_test_ids() const;

  /// Checks these settings against an image shape, batch size and class count.
  void validate(Shape image, std::size_t batch_size, std::size_t num_classes) const;
};

/// Sets the bottom-right `trigger_size` x `trigger_size` block of every
/// channel to 1.0. Throws std::invalid_argument when the trigger does not fit.
void apply_pixel_trigger(std::span<double> image, Shape shape, std::size_t trigger_size);

/// Poisons exactly min(poison_per_batch, |batch|) randomly chosen slots of a
/// batch: pixel kind stamps the trigger, semantic kind swaps in a random
/// training carrier from `semantic_source`. Poisoned images get additive
/// N(0, sigma^2) noise on every pixel, are clamped to [0,1] and relabeled to
/// the target class. Other slots are untouched.
LabeledDataset poison_batch(LabeledDataset batch, const BackdoorSpec& spec, std::uint64_t seed,
                            const LabeledDataset* semantic_source = nullptr);

/// Backdoor evaluation set, every label set to the target class.
///   pixel kind:    triggered (and noised) copies of every image of `source`.
///   semantic kind: `copies` random flip + reflect-pad-4 crop augmentations
///                  of each held-out carrier, with carrier ids indexing `source`.
LabeledDataset build_backdoor_testset(const BackdoorSpec& spec, const LabeledDataset& source,
                                      std::uint64_t seed, std::size_t copies = 10);

/// Random horizontal flip plus a random crop from the image padded by `pad`
/// pixels with reflection.
void flip_and_crop(std::span<const double> image, Shape shape, std::size_t pad, bool flip,
                   std::size_t offset_y, std::size_t offset_x, std::span<double> out);

}  // namespace fedtest::data
