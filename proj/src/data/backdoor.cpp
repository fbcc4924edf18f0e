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

#include "fedtest/data/backdoor.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fedtest/rng.hpp"

namespace fedtest::data {
namespace {

void add_noise_and_clamp(std::span<double> image, double sigma, Rng& rng) {
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : image) v += noise(rng);
  }
  for (double& v : image) v = std::clamp(v, 0.0, 1.0);
}

// Reflection without repeating the edge pixel, as in numpy's "reflect".
std::size_t reflect(long i, std::size_t n) {
  if (n == 1) return 0;
  const long period = 2 * (static_cast<long>(n) - 1);
  long m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<long>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

std::string to_string(BackdoorKind kind) {
  return kind == BackdoorKind::kPixelPattern ? "pixel_pattern" : "semantic";
}

BackdoorKind backdoor_kind_from_string(const std::string& s) {
  if (s == "pixel_pattern" || s == "pixel") return BackdoorKind::kPixelPattern;
  if (s == "semantic") return BackdoorKind::kSemantic;
  throw std::invalid_argument("unknown backdoor kind '" + s + "'");
}

std::span<const std::size_t> BackdoorSpec::semantic_train_ids() const {
  const std::size_t n = std::min(semantic_split.first, semantic_sample_ids.size());
  return std::span<const std::size_t>(semantic_sample_ids).first(n);
}

std::span<const std::size_t> BackdoorSpec::semantic_test_ids() const {
  const std::size_t n = std::min(semantic_split.first, semantic_sample_ids.size());
  return std::span<const std::size_t>(semantic_sample_ids).subspan(n);
}

void BackdoorSpec::validate(Shape image, std::size_t batch_size, std::size_t num_classes) const {
  if (target_class < 0 || static_cast<std::size_t>(target_class) >= num_classes) {
    throw std::invalid_argument("backdoor target class out of range");
  }
  if (poison_per_batch > batch_size) {
    throw std::invalid_argument("poison_per_batch exceeds the batch size");
  }
  if (noise_sigma < 0.0) throw std::invalid_argument("noise sigma must be non-negative");
  if (kind == BackdoorKind::kPixelPattern) {
    if (trigger_size > std::min(image.height, image.width)) {
      throw std::invalid_argument("trigger larger than the image");
    }
  } else if (semantic_split.first + semantic_split.second != semantic_sample_ids.size()) {
    throw std::invalid_argument("semantic split sizes must sum to the number of carrier ids");
  }
}

void apply_pixel_trigger(std::span<double> image, Shape shape, std::size_t trigger_size) {
  if (trigger_size > shape.height || trigger_size > shape.width) {
    throw std::invalid_argument("trigger of size " + std::to_string(trigger_size) +
                                " does not fit image " + shape.str());
  }
  if (image.size() != shape.volume()) throw std::invalid_argument("image size mismatch");
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (std::size_t h = shape.height - trigger_size; h < shape.height; ++h) {
      for (std::size_t w = shape.width - trigger_size; w < shape.width; ++w) {
        image[(c * shape.height + h) * shape.width + w] = 1.0;
      }
    }
  }
}

LabeledDataset poison_batch(LabeledDataset batch, const BackdoorSpec& spec, std::uint64_t seed,
                            const LabeledDataset* semantic_source) {
  const std::size_t count = std::min(spec.poison_per_batch, batch.size());
  if (count == 0) return batch;
  const auto carriers = spec.semantic_train_ids();
  if (spec.kind == BackdoorKind::kSemantic) {
    if (carriers.empty() || semantic_source == nullptr) {
      throw std::invalid_argument("semantic poisoning without training carriers");
    }
  }
  Rng rng = make_rng(seed, Stream::kPoison);
  std::vector<std::size_t> slots(batch.size());
  std::iota(slots.begin(), slots.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, slots.size() - 1);
    std::swap(slots[i], slots[pick(rng)]);
  }
  slots.resize(count);
  std::sort(slots.begin(), slots.end());

  const Shape shape = batch.image_shape();
  for (std::size_t slot : slots) {
    auto image = batch.images.sample(slot);
    if (spec.kind == BackdoorKind::kPixelPattern) {
      apply_pixel_trigger(image, shape, spec.trigger_size);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, carriers.size() - 1);
      const auto src = semantic_source->images.sample(carriers[pick(rng)]);
      std::copy(src.begin(), src.end(), image.begin());
    }
    add_noise_and_clamp(image, spec.noise_sigma, rng);
    batch.labels[slot] = spec.target_class;
  }
  return batch;
}

void flip_and_crop(std::span<const double> image, Shape shape, std::size_t pad, bool flip,
                   std::size_t offset_y, std::size_t offset_x, std::span<double> out) {
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (std::size_t h = 0; h < shape.height; ++h) {
      const std::size_t sy =
          reflect(static_cast<long>(h + offset_y) - static_cast<long>(pad), shape.height);
      for (std::size_t w = 0; w < shape.width; ++w) {
        std::size_t sx =
            reflect(static_cast<long>(w + offset_x) - static_cast<long>(pad), shape.width);
        if (flip) sx = shape.width - 1 - sx;
        out[(c * shape.height + h) * shape.width + w] =
            image[(c * shape.height + sy) * shape.width + sx];
      }
    }
  }
}

LabeledDataset build_backdoor_testset(const BackdoorSpec& spec, const LabeledDataset& source,
                                      std::uint64_t seed, std::size_t copies) {
  Rng rng = make_rng(seed, Stream::kBackdoorTestset);
  const Shape shape = source.image_shape();
  if (spec.kind == BackdoorKind::kPixelPattern) {
    if (source.empty()) throw std::invalid_argument("backdoor test set from an empty source");
    LabeledDataset out = source;
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto image = out.images.sample(i);
      apply_pixel_trigger(image, shape, spec.trigger_size);
      add_noise_and_clamp(image, spec.noise_sigma, rng);
      out.labels[i] = spec.target_class;
    }
    return out;
  }

  const auto held_out = spec.semantic_test_ids();
  if (held_out.empty() || copies == 0) {
    throw std::invalid_argument("semantic backdoor test set needs held-out carriers");
  }
  constexpr std::size_t kPad = 4;
  std::uniform_int_distribution<std::size_t> offset(0, 2 * kPad);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> data(held_out.size() * copies * shape.volume());
  std::vector<int> labels(held_out.size() * copies, spec.target_class);
  std::size_t k = 0;
  for (std::size_t id : held_out) {
    if (id >= source.size()) throw std::invalid_argument("carrier id out of range");
    const auto src = source.images.sample(id);
    for (std::size_t r = 0; r < copies; ++r, ++k) {
      const bool flip = coin(rng);
      const std::size_t oy = offset(rng);
      const std::size_t ox = offset(rng);
      flip_and_crop(src, shape, kPad, flip, oy, ox,
                    std::span<double>(data).subspan(k * shape.volume(), shape.volume()));
    }
  }
  LabeledDataset out;
  out.num_classes = source.num_classes;
  out.images = Tensor(labels.size(), shape, std::move(data));
  out.labels = std::move(labels);
  return out;
}

}  // namespace fedtest::data
