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

#include <gtest/gtest.h>

#include <set>

#include "fedtest/param_vector.hpp"
#include "fedtest/rng.hpp"
#include "fedtest/stats.hpp"
#include "fedtest/tensor.hpp"

using namespace fedtest;

TEST(ParamVector, ArithmeticRequiresMatchingLayout) {
  ParamVector a("net:a", {1.0, 2.0});
  ParamVector b("net:a", {3.0, -1.0});
  ParamVector other("net:b", {3.0, -1.0});

  EXPECT_EQ((a + b).values()[0], 4.0);
  EXPECT_EQ((a - b).values()[1], 3.0);
  EXPECT_EQ((2.0 * a).values()[1], 4.0);
  EXPECT_THROW(a + other, LayoutMismatch);
  EXPECT_THROW(a.add_scaled(other, 1.0), LayoutMismatch);
  EXPECT_FALSE(a.compatible(other));

  ParamVector shorter("net:a", {1.0});
  EXPECT_THROW(a += shorter, LayoutMismatch);
}

TEST(ParamVector, NormsAndDistances) {
  ParamVector a("x", {3.0, 4.0});
  ParamVector z("x", 2);
  EXPECT_DOUBLE_EQ(a.norm2(), 5.0);
  EXPECT_DOUBLE_EQ(a.squared_distance(z), 25.0);
  a.add_scaled(a, -1.0);
  EXPECT_EQ(a, z);
}

TEST(Rng, DerivedSeedsDependOnEveryCoordinate) {
  const auto s = derive_seed(1, Stream::kLocalTraining, {3, 4});
  EXPECT_EQ(s, derive_seed(1, Stream::kLocalTraining, {3, 4}));
  EXPECT_NE(s, derive_seed(2, Stream::kLocalTraining, {3, 4}));
  EXPECT_NE(s, derive_seed(1, Stream::kPoison, {3, 4}));
  EXPECT_NE(s, derive_seed(1, Stream::kLocalTraining, {4, 3}));
  EXPECT_NE(s, derive_seed(1, Stream::kLocalTraining, {3, 4, 0}));

  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a) {
    for (std::uint64_t r = 0; r < 50; ++r) seen.insert(derive_seed(9, Stream::kSelection, {a, r}));
  }
  EXPECT_EQ(seen.size(), 2500u);
}

TEST(Stats, MedianOfEvenCountAveragesCentralPair) {
  EXPECT_DOUBLE_EQ(stats::median(std::vector<double>{3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(stats::median(std::vector<double>{4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_DOUBLE_EQ(stats::mean(std::vector<double>{1.0, 2.0, 6.0}), 3.0);
  EXPECT_THROW(stats::median(std::vector<double>{}), std::invalid_argument);
}

TEST(Tensor, IndexingIsRowMajorNCHW) {
  Tensor t(2, Shape{3, 4, 5});
  t.at(1, 2, 3, 4) = 7.0;
  EXPECT_EQ(t.data()[1 * 60 + 2 * 20 + 3 * 5 + 4], 7.0);
  EXPECT_EQ(t.sample(1)[59], 7.0);
  EXPECT_EQ(t.sample_size(), 60u);
  EXPECT_THROW(Tensor(2, Shape{3}, std::vector<double>(5)), std::invalid_argument);
}
