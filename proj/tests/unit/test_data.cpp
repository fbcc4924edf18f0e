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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <unistd.h>

#include "fedtest/data/backdoor.hpp"
#include "fedtest/data/dataset.hpp"
#include "fedtest/data/idx.hpp"
#include "fedtest/data/partition.hpp"
#include "fedtest/data/synthetic.hpp"
#include "fedtest/data/validation.hpp"

using namespace fedtest;
using namespace fedtest::data;

namespace fs = std::filesystem;

namespace {

LabeledDataset random_dataset(std::size_t n, std::size_t classes, Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabeledDataset ds = make_dataset(shape, classes);
  ds.images = Tensor(n, shape);
  for (auto& v : ds.images.data()) v = u(rng);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = static_cast<int>(i % classes);
  return ds;
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("fedtest_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Dataset, BinaryRoundTripKeepsFloat32Pixels) {
  const auto dir = temp_dir("roundtrip");
  auto ds = random_dataset(9, 3, Shape{2, 5, 4}, 1);
  write_dataset(dir / "d.bin", ds);
  const auto back = read_dataset(dir / "d.bin", 3);
  ASSERT_EQ(back.size(), 9u);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.image_shape(), (Shape{2, 5, 4}));
  for (std::size_t i = 0; i < ds.images.data().size(); ++i) {
    EXPECT_EQ(back.images.data()[i], static_cast<double>(static_cast<float>(ds.images.data()[i])));
  }
  fs::remove_all(dir);
}

TEST(Dataset, ReaderRejectsCorruptFiles) {
  const auto dir = temp_dir("corrupt");
  auto ds = random_dataset(4, 2, Shape{1, 3, 3}, 2);
  write_dataset(dir / "ok.bin", ds);
  const auto size = fs::file_size(dir / "ok.bin");
  fs::copy_file(dir / "ok.bin", dir / "short.bin");
  fs::resize_file(dir / "short.bin", size - 3);
  EXPECT_THROW(read_dataset(dir / "short.bin"), DataError);
  EXPECT_THROW(read_dataset(dir / "missing.bin"), DataError);
  EXPECT_THROW(read_dataset(dir / "ok.bin", 1), DataError);  // label 1 outside one class

  ds.images.data()[0] = 1.5;
  write_dataset(dir / "range.bin", ds);
  EXPECT_THROW(read_dataset(dir / "range.bin"), DataError);
  fs::remove_all(dir);
}

TEST(Dataset, SubsetAndClassIndices) {
  const auto ds = random_dataset(10, 3, Shape{1, 2, 2}, 3);
  EXPECT_EQ(ds.indices_of(1), (std::vector<std::size_t>{1, 4, 7}));
  const std::vector<std::size_t> pick{7, 0};
  const auto sub = ds.subset(pick);
  EXPECT_EQ(sub.labels, (std::vector<int>{1, 0}));
  EXPECT_EQ(sub.images.sample(0)[2], ds.images.sample(7)[2]);
}

TEST(Dataset, DirectoryRoundTripIncludesSemanticIds) {
  const auto dir = temp_dir("bundle");
  DatasetBundle b;
  b.train = random_dataset(6, 2, Shape{1, 2, 2}, 4);
  b.test = random_dataset(4, 2, Shape{1, 2, 2}, 5);
  b.semantic_ids = {5, 1};
  save_dataset_dir(dir, b);
  const auto back = load_dataset_dir(dir);
  EXPECT_EQ(back.train.size(), 6u);
  EXPECT_EQ(back.test.size(), 4u);
  EXPECT_EQ(back.semantic_ids, b.semantic_ids);
  fs::remove_all(dir);
}

TEST(Idx, ReadsBigEndianImagesAndLabels) {
  const auto dir = temp_dir("idx");
  {
    std::ofstream img(dir / "img", std::ios::binary);
    const unsigned char header[] = {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 3};
    img.write(reinterpret_cast<const char*>(header), sizeof(header));
    const unsigned char pixels[] = {0, 255, 51, 0, 0, 0, 255, 255, 255, 255, 255, 255};
    img.write(reinterpret_cast<const char*>(pixels), sizeof(pixels));
    std::ofstream lab(dir / "lab", std::ios::binary);
    const unsigned char lheader[] = {0, 0, 8, 1, 0, 0, 0, 2, 7, 2};
    lab.write(reinterpret_cast<const char*>(lheader), sizeof(lheader));
  }
  const auto ds = read_idx(dir / "img", dir / "lab", 10);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.image_shape(), (Shape{1, 2, 3}));
  EXPECT_EQ(ds.labels, (std::vector<int>{7, 2}));
  EXPECT_DOUBLE_EQ(ds.images.data()[1], 1.0);
  EXPECT_DOUBLE_EQ(ds.images.data()[2], 0.2);
  EXPECT_THROW(read_idx(dir / "lab", dir / "img", 10), DataError);
  fs::remove_all(dir);
}

TEST(Partition, SingleAgentGetsEverything) {
  const auto ds = random_dataset(50, 5, Shape{1, 1, 1}, 1);
  const auto plan = dirichlet_partition(ds, 1, 0.5, 3);
  ASSERT_EQ(plan.agent_indices.size(), 1u);
  std::vector<std::size_t> all(50);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(plan.agent_indices[0], all);
}

TEST(Partition, RejectsBadArguments) {
  const auto ds = random_dataset(20, 2, Shape{1, 1, 1}, 1);
  EXPECT_THROW(dirichlet_partition(ds, 0, 0.5, 1), std::invalid_argument);
  EXPECT_THROW(dirichlet_partition(ds, 3, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(dirichlet_partition(ds, 3, -1.0, 1), std::invalid_argument);
}

TEST(Partition, IsDeterministicAndSeedSensitive) {
  const auto ds = random_dataset(300, 10, Shape{1, 1, 1}, 1);
  const auto a = dirichlet_partition(ds, 7, 0.9, 11);
  EXPECT_EQ(a.agent_indices, dirichlet_partition(ds, 7, 0.9, 11).agent_indices);
  EXPECT_NE(a.agent_indices, dirichlet_partition(ds, 7, 0.9, 12).agent_indices);
}

TEST(Partition, HugeAlphaIsNearlyUniform) {
  const auto ds = random_dataset(10000, 10, Shape{1, 1, 1}, 2);
  const auto plan = dirichlet_partition(ds, 10, 1e6, 5);
  for (const auto& list : plan.agent_indices) {
    std::vector<std::size_t> per_class(10, 0);
    for (std::size_t i : list) ++per_class[static_cast<std::size_t>(ds.labels[i])];
    for (std::size_t c = 0; c < 10; ++c) {
      const double share = static_cast<double>(per_class[c]) / 1000.0;
      EXPECT_NEAR(share, 0.1, 0.005) << "class " << c;
    }
  }
}

TEST(Partition, PoolOverloadOnlyDistributesThePool) {
  auto ds = random_dataset(40, 4, Shape{1, 1, 1}, 3);
  for (std::size_t i = 0; i < 4; ++i) ds.labels[2 * i] = static_cast<int>(i);  // every class in the pool
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < 40; i += 2) pool.push_back(i);
  const auto plan = dirichlet_partition(ds, pool, 3, 1.0, 9);
  std::vector<std::size_t> got;
  for (const auto& l : plan.agent_indices) got.insert(got.end(), l.begin(), l.end());
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, pool);
}

TEST(Partition, LargestRemainderHitsTheTotal) {
  const std::vector<double> w{0.5, 0.3, 0.2};
  EXPECT_EQ(largest_remainder(w, 10), (std::vector<std::size_t>{5, 3, 2}));
  const std::vector<double> v{1.0, 1.0, 1.0};
  const auto r = largest_remainder(v, 10);
  EXPECT_EQ(std::accumulate(r.begin(), r.end(), std::size_t{0}), 10u);
}

TEST(Trigger, StampsTheBottomRightBlock) {
  std::vector<double> img(28 * 28, 0.0);
  apply_pixel_trigger(img, Shape{1, 28, 28}, 4);
  std::size_t ones = 0;
  for (std::size_t r = 0; r < 28; ++r) {
    for (std::size_t c = 0; c < 28; ++c) {
      const bool inside = r >= 24 && c >= 24;
      EXPECT_EQ(img[r * 28 + c], inside ? 1.0 : 0.0);
      ones += img[r * 28 + c] == 1.0;
    }
  }
  EXPECT_EQ(ones, 16u);

  std::vector<double> white(3 * 8 * 8, 1.0);
  apply_pixel_trigger(white, Shape{3, 8, 8}, 4);
  EXPECT_TRUE(std::all_of(white.begin(), white.end(), [](double v) { return v == 1.0; }));

  std::vector<double> small(9, 0.0);
  EXPECT_THROW(apply_pixel_trigger(small, Shape{1, 3, 3}, 4), std::invalid_argument);
}

TEST(Poison, PoisonsExactlyTheRequestedCount) {
  const auto batch = random_dataset(64, 10, Shape{1, 28, 28}, 6);
  BackdoorSpec spec;
  spec.target_class = 3;
  spec.poison_per_batch = 20;
  const auto out = poison_batch(batch, spec, 42);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < 64; ++i) {
    const bool same = std::equal(out.images.sample(i).begin(), out.images.sample(i).end(),
                                 batch.images.sample(i).begin());
    if (!same) {
      ++changed;
      EXPECT_EQ(out.labels[i], 3);
      for (double v : out.images.sample(i)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    } else {
      EXPECT_EQ(out.labels[i], batch.labels[i]);
    }
  }
  EXPECT_EQ(changed, 20u);
  EXPECT_EQ(out.images, poison_batch(batch, spec, 42).images);
}

TEST(Poison, ZeroCountLeavesBatchAlone) {
  const auto batch = random_dataset(16, 4, Shape{1, 6, 6}, 7);
  BackdoorSpec spec;
  spec.poison_per_batch = 0;
  const auto out = poison_batch(batch, spec, 1);
  EXPECT_EQ(out.images, batch.images);
  EXPECT_EQ(out.labels, batch.labels);
}

TEST(Poison, NoiselessPoisonEqualsTheTrigger) {
  const auto batch = random_dataset(10, 4, Shape{1, 8, 8}, 8);
  BackdoorSpec spec;
  spec.poison_per_batch = 10;
  spec.noise_sigma = 0.0;
  spec.target_class = 1;
  const auto out = poison_batch(batch, spec, 3);
  for (std::size_t i = 0; i < 10; ++i) {
    std::vector<double> expect(batch.images.sample(i).begin(), batch.images.sample(i).end());
    apply_pixel_trigger(expect, Shape{1, 8, 8}, spec.trigger_size);
    EXPECT_TRUE(std::equal(expect.begin(), expect.end(), out.images.sample(i).begin()));
  }
}

TEST(Poison, SemanticKindCopiesTrainingCarriers) {
  const auto source = random_dataset(30, 3, Shape{1, 4, 4}, 9);
  const auto batch = random_dataset(8, 3, Shape{1, 4, 4}, 10);
  BackdoorSpec spec;
  spec.kind = BackdoorKind::kSemantic;
  spec.poison_per_batch = 8;
  spec.noise_sigma = 0.0;
  spec.target_class = 2;
  spec.semantic_sample_ids = {3, 5, 7, 11};
  spec.semantic_split = {2, 2};
  const auto out = poison_batch(batch, spec, 1, &source);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto img = out.images.sample(i);
    const bool from_3 = std::equal(img.begin(), img.end(), source.images.sample(3).begin());
    const bool from_5 = std::equal(img.begin(), img.end(), source.images.sample(5).begin());
    EXPECT_TRUE(from_3 || from_5) << "slot " << i;
    EXPECT_EQ(out.labels[i], 2);
  }
  BackdoorSpec empty = spec;
  empty.semantic_sample_ids.clear();
  EXPECT_THROW(poison_batch(batch, empty, 1, &source), std::invalid_argument);
}

TEST(BackdoorTestset, PixelKindTriggersEverySourceImage) {
  const auto clean = random_dataset(100, 10, Shape{1, 28, 28}, 12);
  BackdoorSpec spec;
  spec.target_class = 4;
  const auto bd = build_backdoor_testset(spec, clean, 5);
  ASSERT_EQ(bd.size(), 100u);
  EXPECT_TRUE(std::all_of(bd.labels.begin(), bd.labels.end(), [](int l) { return l == 4; }));
  EXPECT_EQ(bd.images, build_backdoor_testset(spec, clean, 5).images);
  EXPECT_THROW(build_backdoor_testset(spec, clean.subset({}), 5), std::invalid_argument);
}

TEST(BackdoorTestset, SemanticKindAugmentsHeldOutCarriers) {
  const auto source = random_dataset(80, 3, Shape{1, 8, 8}, 13);
  BackdoorSpec spec;
  spec.kind = BackdoorKind::kSemantic;
  spec.target_class = 0;
  spec.semantic_sample_ids.resize(63);
  std::iota(spec.semantic_sample_ids.begin(), spec.semantic_sample_ids.end(), 10);
  spec.semantic_split = {48, 15};
  EXPECT_EQ(spec.semantic_test_ids().size(), 15u);
  const auto bd = build_backdoor_testset(spec, source, 2, 10);
  EXPECT_EQ(bd.size(), 150u);
  EXPECT_TRUE(std::all_of(bd.labels.begin(), bd.labels.end(), [](int l) { return l == 0; }));
}

TEST(ValidationSeeds, SpreadsEvenlyOverClasses) {
  const auto ds = random_dataset(500, 10, Shape{1, 2, 2}, 14);
  const auto seeds = sample_validation_seeds(ds, 20, 10, 3);
  ASSERT_EQ(seeds.size(), 20u);
  std::vector<int> counts(10, 0);
  for (int l : seeds.labels) ++counts[static_cast<std::size_t>(l)];
  EXPECT_TRUE(std::all_of(counts.begin(), counts.end(), [](int c) { return c == 2; }));

  const auto one = sample_validation_seeds(ds, 20, 1, 3);
  EXPECT_EQ(std::set<int>(one.labels.begin(), one.labels.end()).size(), 1u);
  EXPECT_EQ(seeds.images, sample_validation_seeds(ds, 20, 10, 3).images);
}

TEST(ValidationSeeds, EmptyClassIsAnError) {
  auto ds = random_dataset(30, 3, Shape{1, 2, 2}, 15);
  ds.num_classes = 4;  // class 3 has no samples
  EXPECT_THROW(sample_validation_seeds(ds, 8, 4, 1), std::invalid_argument);
}

TEST(Synthetic, ProducesValidBalancedData) {
  SyntheticOptions opt;
  opt.train_size = 400;
  opt.test_size = 100;
  opt.semantic_carriers = 10;
  const auto b = make_synthetic_shapes(opt);
  b.train.validate();
  b.test.validate();
  EXPECT_EQ(b.train.size(), 410u);
  EXPECT_EQ(b.test.size(), 100u);
  EXPECT_EQ(b.train.image_shape(), (Shape{1, 28, 28}));
  EXPECT_EQ(b.semantic_ids.size(), 10u);
  for (std::size_t id : b.semantic_ids) EXPECT_EQ(b.train.labels[id], opt.semantic_source_class);
  for (int c = 0; c < 10; ++c) EXPECT_EQ(b.test.indices_of(c).size(), 10u);
  EXPECT_EQ(make_synthetic_shapes(opt).train.images, b.train.images);
}
