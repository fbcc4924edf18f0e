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

#include <cmath>
#include <random>

#include "fedtest/nn/architectures.hpp"
#include "fedtest/train/local_training.hpp"

using namespace fedtest;
using namespace fedtest::train;

namespace {

data::LabeledDataset blobs(std::size_t n, std::uint64_t seed) {
  // Two classes separable by mean brightness of the left half.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  data::LabeledDataset ds = data::make_dataset(Shape{1, 6, 6}, 2);
  ds.images = Tensor(n, Shape{1, 6, 6});
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    ds.labels[i] = label;
    auto img = ds.images.sample(i);
    for (std::size_t p = 0; p < img.size(); ++p) {
      const bool left = (p % 6) < 3;
      img[p] = u(rng) + ((left == (label == 1)) ? 0.5 : 0.0);
    }
  }
  return ds;
}

nn::Classifier small_model(std::uint64_t seed) {
  const auto arch = nn::make_mlp(Shape{1, 6, 6}, 8, 2);
  return nn::Classifier(arch, arch->init_params(seed));
}

}  // namespace

TEST(TrainBenign, ZeroLearningRateGivesZeroUpdate) {
  TrainingHyper h;
  h.learning_rate = 0.0;
  const auto r = train_benign(small_model(1), blobs(40, 1), h, 7);
  EXPECT_EQ(r.update.norm2(), 0.0);
  EXPECT_GT(r.steps, 0u);
}

TEST(TrainBenign, EmptyDataGivesZeroUpdateAndWarning) {
  const auto model = small_model(1);
  const auto r = train_benign(model, blobs(40, 1).subset({}), TrainingHyper{}, 7);
  EXPECT_EQ(r.update.norm2(), 0.0);
  EXPECT_EQ(r.update.layout_id(), model.params().layout_id());
  EXPECT_TRUE(r.warning.has_value());
}

TEST(TrainBenign, SingleStepMatchesClosedForm) {
  const auto model = small_model(3);
  const auto one = blobs(1, 4);
  TrainingHyper h;
  h.local_epochs = 1;
  h.batch_size = 1;
  h.learning_rate = 0.1;
  h.weight_decay = 0.01;
  h.momentum = 0.9;
  const auto r = train_benign(model, one, h, 5);

  // Oracle: finite-difference gradient of the cross-entropy.
  const auto w = model.params();
  constexpr double eps = 1e-6;
  for (std::size_t j = 0; j < w.size(); ++j) {
    ParamVector plus = w, minus = w;
    plus[j] += eps;
    minus[j] -= eps;
    const double g = (mean_cross_entropy(nn::Classifier(model.architecture_ptr(), plus), one) -
                      mean_cross_entropy(nn::Classifier(model.architecture_ptr(), minus), one)) /
                     (2 * eps);
    EXPECT_NEAR(r.update[j], -h.learning_rate * (g + h.weight_decay * w[j]), 1e-8) << "param " << j;
  }
}

TEST(TrainBenign, TrainingReducesLocalLoss) {
  std::size_t improved = 0;
  constexpr std::size_t kRuns = 20;
  for (std::uint64_t s = 0; s < kRuns; ++s) {
    const auto model = small_model(s);
    const auto data = blobs(64, 100 + s);
    TrainingHyper h;
    h.local_epochs = 2;
    h.batch_size = 16;
    const auto r = train_benign(model, data, h, s);
    const nn::Classifier after(model.architecture_ptr(), model.params() + r.update);
    if (mean_cross_entropy(after, data) <= mean_cross_entropy(model, data)) ++improved;
  }
  EXPECT_GE(improved, 19u);
}

TEST(TrainBenign, IsDeterministicPerSeed) {
  const auto model = small_model(2);
  const auto data = blobs(50, 2);
  EXPECT_EQ(train_benign(model, data, TrainingHyper{}, 9).update,
            train_benign(model, data, TrainingHyper{}, 9).update);
  EXPECT_NE(train_benign(model, data, TrainingHyper{}, 9).update,
            train_benign(model, data, TrainingHyper{}, 10).update);
}

TEST(TrainAdversarial, AlphaOneWithoutPoisonEqualsBenign) {
  const auto model = small_model(4);
  const auto data = blobs(50, 3);
  AttackConfig attack;
  attack.alpha = 1.0;
  attack.backdoor.poison_per_batch = 0;
  attack.backdoor.noise_sigma = 0.0;
  attack.backdoor.trigger_size = 2;
  const auto adv = train_adversarial(model, data, attack, model.params(), TrainingHyper{}, 11);
  const auto ben = train_benign(model, data, TrainingHyper{}, 11);
  EXPECT_EQ(adv.update, ben.update);
}

TEST(TrainAdversarial, PureAnchorStaysCloserThanBenign) {
  const auto model = small_model(5);
  const auto data = blobs(50, 5);
  AttackConfig attack;
  attack.alpha = 0.0;
  attack.backdoor.trigger_size = 2;
  attack.backdoor.poison_per_batch = 10;
  TrainingHyper h;
  h.batch_size = 16;
  const auto adv = train_adversarial(model, data, attack, model.params(), h, 3);
  const auto ben = train_benign(model, data, h, 3);
  EXPECT_LE(adv.update.norm2(), ben.update.norm2());
}

TEST(TrainAdversarial, ValidatesInputs) {
  const auto model = small_model(5);
  const auto data = blobs(10, 5);
  AttackConfig attack;
  attack.backdoor.trigger_size = 2;
  attack.alpha = 1.5;
  EXPECT_THROW(train_adversarial(model, data, attack, model.params(), TrainingHyper{}, 1),
               std::invalid_argument);
  attack.alpha = 0.7;
  const ParamVector foreign("other", model.params().size());
  EXPECT_THROW(train_adversarial(model, data, attack, foreign, TrainingHyper{}, 1), LayoutMismatch);
}

TEST(ScaleUpdate, ScalesByGammaOverColluders) {
  const ParamVector u("x", {1.0, -2.0, 0.5});
  EXPECT_EQ(scale_update(u, 10.0, 1), 10.0 * u);
  EXPECT_EQ(scale_update(u, 10.0, 2), 5.0 * u);
  EXPECT_EQ(scale_update(u, 1.0, 1), u);
  EXPECT_THROW(scale_update(u, 10.0, 0), std::invalid_argument);
  EXPECT_THROW(scale_update(u, 0.0, 1), std::invalid_argument);
}

TEST(ScaleUpdate, RoundTripIsExactForDyadicGamma) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(200);
  for (auto& x : v) x = n(rng);
  const ParamVector u("x", v);
  for (double gamma : {2.0, 4.0, 0.25, 1024.0}) {
    EXPECT_EQ(scale_update(scale_update(u, gamma, 1), 1.0 / gamma, 1), u) << gamma;
  }
  // Other factors round twice; the result stays within two ulps.
  for (double gamma : {5.0, 10.0, 3.0}) {
    const auto back = scale_update(scale_update(u, gamma, 1), 1.0 / gamma, 1);
    for (std::size_t i = 0; i < u.size(); ++i) {
      EXPECT_LE(std::abs(back[i] - u[i]), 2 * std::abs(u[i]) * std::numeric_limits<double>::epsilon());
    }
  }
}
