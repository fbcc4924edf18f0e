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

#include "fedtest/nn/architectures.hpp"

#include <stdexcept>
#include <vector>

namespace fedtest::nn {

std::shared_ptr<const Architecture> make_small_cnn(Shape input, std::size_t num_classes,
                                                   std::size_t channels1,
                                                   std::size_t channels2) {
  std::vector<LayerPtr> layers;
  auto c1 = std::make_unique<Conv2d>(input, channels1, 5, 2, 0);
  const Shape s1 = c1->output_shape();
  layers.push_back(std::move(c1));
  layers.push_back(std::make_unique<Relu>(s1));
  auto c2 = std::make_unique<Conv2d>(s1, channels2, 3, 2, 0);
  const Shape s2 = c2->output_shape();
  layers.push_back(std::move(c2));
  layers.push_back(std::make_unique<Relu>(s2));
  layers.push_back(std::make_unique<Linear>(s2, num_classes));
  return std::make_shared<Architecture>("cnn", input, std::move(layers));
}

std::shared_ptr<const Architecture> make_mlp(Shape input, std::size_t hidden,
                                             std::size_t num_classes) {
  std::vector<LayerPtr> layers;
  layers.push_back(std::make_unique<Linear>(input, hidden));
  layers.push_back(std::make_unique<Tanh>(Shape{hidden, 1, 1}));
  layers.push_back(std::make_unique<Linear>(Shape{hidden, 1, 1}, num_classes));
  return std::make_shared<Architecture>("mlp", input, std::move(layers));
}

std::shared_ptr<const Architecture> make_small_resnet(Shape input, std::size_t num_classes) {
  std::vector<LayerPtr> layers;
  auto stem = std::make_unique<Conv2d>(input, 16, 3, 2, 1);
  const Shape s1 = stem->output_shape();
  layers.push_back(std::move(stem));
  layers.push_back(std::make_unique<Relu>(s1));
  layers.push_back(std::make_unique<ResidualBlock>(s1));
  auto down = std::make_unique<Conv2d>(s1, 32, 3, 2, 1);
  const Shape s2 = down->output_shape();
  layers.push_back(std::move(down));
  layers.push_back(std::make_unique<Relu>(s2));
  layers.push_back(std::make_unique<ResidualBlock>(s2));
  layers.push_back(std::make_unique<GlobalAvgPool>(s2));
  layers.push_back(std::make_unique<Linear>(Shape{s2.channels, 1, 1}, num_classes));
  return std::make_shared<Architecture>("resnet", input, std::move(layers));
}

std::shared_ptr<const Architecture> make_architecture(const std::string& name, Shape input,
                                                      std::size_t num_classes) {
  if (name == "cnn") return make_small_cnn(input, num_classes);
  if (name == "mlp") return make_mlp(input, 32, num_classes);
  if (name == "resnet") return make_small_resnet(input, num_classes);
  throw std::invalid_argument("unknown architecture '" + name + "'");
}

}  // namespace fedtest::nn
