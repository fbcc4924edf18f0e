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
#include <initializer_list>
#include <random>

namespace fedtest {

using Rng = std::mt19937_64;

/// Purpose tags mixed into derived seeds so that independent consumers of
/// randomness never share a stream.
enum class Stream : std::uint64_t {
  kSelection = 1,
  kLocalTraining = 2,
  kPoison = 3,
  kPartition = 4,
  kValidationSeeds = 5,
  kBackdoorTestset = 6,
  kModelInit = 7,
  kDefense = 8,
  kSynthetic = 9,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Hashes a master seed together with a purpose tag and any number of
/// coordinates (agent id, round, batch index, ...). The result depends only
/// on the arguments, never on call order.
std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                          std::initializer_list<std::uint64_t> coords = {});

inline Rng make_rng(std::uint64_t master, Stream stream,
                    std::initializer_list<std::uint64_t> coords = {}) {
  return Rng(derive_seed(master, stream, coords));
}

}  // namespace fedtest
