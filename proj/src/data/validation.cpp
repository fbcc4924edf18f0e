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

#include "fedtest/data/validation.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fedtest/rng.hpp"

namespace fedtest::data {

std::vector<std::size_t> sample_validation_indices(const LabeledDataset& dataset, std::size_t count,
                                                   std::size_t num_classes_used, std::uint64_t seed) {
  const std::size_t num_classes = dataset.num_classes;
  if (num_classes_used < 1 || num_classes_used > num_classes) {
    throw std::invalid_argument("validation seeds: class count outside [1, C]");
  }
  if (count < num_classes_used) {
    throw std::invalid_argument("validation seeds: fewer images than classes");
  }
  Rng rng = make_rng(seed, Stream::kValidationSeeds);
  std::vector<int> classes(num_classes);
  std::iota(classes.begin(), classes.end(), 0);
  std::shuffle(classes.begin(), classes.end(), rng);
  classes.resize(num_classes_used);

  std::vector<std::size_t> chosen;
  const std::size_t base = count / num_classes_used;
  const std::size_t extra = count % num_classes_used;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const std::size_t want = base + (k < extra ? 1 : 0);
    auto members = dataset.indices_of(classes[k]);
    if (members.empty()) {
      throw std::invalid_argument("validation seeds: class " + std::to_string(classes[k]) +
                                  " has no samples");
    }
    if (members.size() >= want) {
      std::shuffle(members.begin(), members.end(), rng);
      chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<long>(want));
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      for (std::size_t i = 0; i < want; ++i) chosen.push_back(members[pick(rng)]);
    }
  }
  return chosen;
}

LabeledDataset sample_validation_seeds(const LabeledDataset& dataset, std::size_t count,
                                       std::size_t num_classes_used, std::uint64_t seed) {
  return dataset.subset(sample_validation_indices(dataset, count, num_classes_used, seed));
}

}  // namespace fedtest::data
