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
#include <functional>
#include <random>

#include "fedtest/nn/architectures.hpp"
#include "fedtest/nn/classifier.hpp"
#include "fedtest/nn/layers.hpp"

using namespace fedtest;
using namespace fedtest::nn;

namespace {

Tensor random_tensor(std::size_t n, Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(n, shape);
  for (auto& v : t.data()) v = u(rng);
  return t;
}

// J = sum(weights * layer(params, x)); returns the largest relative error of
// the analytic input and parameter gradients against central differences.
double layer_gradient_error(const Layer& layer, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> params(layer.param_count());
  layer.init(params, rng);
  const Tensor x = random_tensor(2, layer.input_shape(), rng);
  const Tensor w = random_tensor(2, layer.output_shape(), rng);

  auto objective = [&](const std::vector<double>& p, const Tensor& in) {
    Tensor out(2, layer.output_shape());
    layer.forward(p, in, out);
    double j = 0.0;
    for (std::size_t i = 0; i < out.data().size(); ++i) j += out.data()[i] * w.data()[i];
    return j;
  };

  Tensor out(2, layer.output_shape());
  layer.forward(params, x, out);
  Tensor grad_in(2, layer.input_shape());
  std::vector<double> grad_params(params.size(), 0.0);
  layer.backward(params, x, out, w, &grad_in, grad_params);

  constexpr double eps = 1e-6;
  double worst = 0.0;
  auto compare = [&](double analytic, double numeric) {
    const double denom = std::max({1e-6, std::abs(analytic), std::abs(numeric)});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    Tensor plus = x, minus = x;
    plus.data()[i] += eps;
    minus.data()[i] -= eps;
    compare(grad_in.data()[i], (objective(params, plus) - objective(params, minus)) / (2 * eps));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto plus = params, minus = params;
    plus[i] += eps;
    minus[i] -= eps;
    compare(grad_params[i], (objective(plus, x) - objective(minus, x)) / (2 * eps));
  }
  return worst;
}

}  // namespace

TEST(Layers, ConvolutionGradientsMatchFiniteDifferences) {
  EXPECT_LT(layer_gradient_error(Conv2d(Shape{2, 7, 6}, 3, 3, 2, 1), 1), 1e-5);
  EXPECT_LT(layer_gradient_error(Conv2d(Shape{1, 5, 5}, 2, 5, 1, 0), 2), 1e-5);
  EXPECT_LT(layer_gradient_error(Conv2d(Shape{1, 6, 6}, 2, 3, 1, 2), 3), 1e-5);
}

TEST(Layers, DenseAndActivationGradientsMatchFiniteDifferences) {
  EXPECT_LT(layer_gradient_error(Linear(Shape{2, 3, 3}, 4), 4), 1e-6);
  EXPECT_LT(layer_gradient_error(Tanh(Shape{5}), 5), 1e-6);
  EXPECT_LT(layer_gradient_error(Relu(Shape{6, 2, 2}), 6), 1e-6);
  EXPECT_LT(layer_gradient_error(GlobalAvgPool(Shape{3, 4, 4}), 7), 1e-6);
  EXPECT_LT(layer_gradient_error(ResidualBlock(Shape{2, 5, 5}), 8), 1e-5);
}

TEST(Layers, ConvolutionOutputShapeFollowsStrideAndPadding) {
  const Conv2d conv(Shape{1, 28, 28}, 8, 5, 2, 0);
  EXPECT_EQ(conv.output_shape(), (Shape{8, 12, 12}));
  EXPECT_EQ(conv.param_count(), 8u * 25 + 8);
  EXPECT_THROW(Conv2d(Shape{1, 3, 3}, 1, 5, 1, 0), std::invalid_argument);
}

TEST(Architecture, SmallCnnHasExpectedLayout) {
  const auto arch = make_small_cnn(Shape{1, 28, 28}, 10);
  EXPECT_EQ(arch->param_count(), 5386u);
  EXPECT_EQ(arch->num_classes(), 10u);
  const auto other = make_small_cnn(Shape{1, 28, 28}, 10, 4, 16);
  EXPECT_NE(arch->layout_id(), other->layout_id());
  EXPECT_EQ(arch->init_params(3), arch->init_params(3));
  EXPECT_NE(arch->init_params(3), arch->init_params(4));
  EXPECT_THROW(make_architecture("vgg", Shape{1, 28, 28}, 10), std::invalid_argument);
}

TEST(Classifier, RejectsForeignParameters) {
  const auto cnn = make_small_cnn(Shape{1, 28, 28}, 10);
  const auto mlp = make_mlp(Shape{1, 28, 28}, 8, 10);
  EXPECT_THROW(Classifier(cnn, mlp->init_params(1)), LayoutMismatch);
}

TEST(Classifier, SoftmaxRowsAreDistributions) {
  std::mt19937_64 rng(11);
  for (const char* name : {"cnn", "mlp"}) {
    const auto arch = make_architecture(name, Shape{1, 28, 28}, 10);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Classifier model(arch, arch->init_params(seed));
      const Tensor x = random_tensor(7, Shape{1, 28, 28}, rng, 0.0, 1.0);
      const Tensor p = model.forward(x);
      for (std::size_t n = 0; n < 7; ++n) {
        double sum = 0.0;
        for (double v : p.sample(n)) {
          EXPECT_GE(v, 0.0);
          sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-5);
      }
    }
  }
  const auto resnet = make_small_resnet(Shape{3, 32, 32}, 10);
  const Classifier model(resnet, resnet->init_params(1));
  const Tensor p = model.forward(random_tensor(2, Shape{3, 32, 32}, rng, 0.0, 1.0));
  double sum = 0.0;
  for (double v : p.sample(1)) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-5);
}

TEST(Classifier, SoftmaxIsStableForLargeLogits) {
  Tensor logits(1, Shape{3}, std::vector<double>{1000.0, 999.0, -1000.0});
  const Tensor p = softmax(logits);
  EXPECT_TRUE(std::isfinite(p.data()[0]));
  EXPECT_NEAR(p.data()[0] + p.data()[1], 1.0, 1e-12);
}

TEST(Classifier, InputGradientThroughProbabilitiesMatchesFiniteDifferences) {
  const auto arch = make_small_cnn(Shape{1, 12, 12}, 5, 3, 4);
  const Classifier model(arch, arch->init_params(21));
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor(2, Shape{1, 12, 12}, rng, 0.0, 1.0);
  const Tensor w = random_tensor(2, Shape{5}, rng);
  auto objective = [&](const Tensor& in) {
    const Tensor p = model.forward(in);
    double j = 0.0;
    for (std::size_t i = 0; i < p.data().size(); ++i) j += p.data()[i] * w.data()[i];
    return j;
  };
  const auto pass = model.forward_pass(x);
  Tensor grad_x;
  model.backward_probs(pass, w, {}, &grad_x);
  ASSERT_EQ(grad_x.data().size(), x.data().size());
  constexpr double eps = 1e-6;
  for (std::size_t i = 0; i < x.data().size(); i += 7) {
    Tensor plus = x, minus = x;
    plus.data()[i] += eps;
    minus.data()[i] -= eps;
    const double numeric = (objective(plus) - objective(minus)) / (2 * eps);
    EXPECT_NEAR(grad_x.data()[i], numeric, 1e-6 + 1e-4 * std::abs(numeric));
  }
}

TEST(Classifier, CountsSingleImageForwardEvaluations) {
  const auto arch = make_mlp(Shape{1, 4, 4}, 6, 3);
  Classifier model(arch, arch->init_params(1));
  std::mt19937_64 rng(1);
  model.forward(random_tensor(5, Shape{1, 4, 4}, rng));
  model.forward_pass(random_tensor(3, Shape{1, 4, 4}, rng));
  EXPECT_EQ(model.forward_count(), 8u);
  model.reset_forward_count();
  model.predict_labels(random_tensor(600, Shape{1, 4, 4}, rng), 256);
  EXPECT_EQ(model.forward_count(), 600u);
}
