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

#include <memory>
#include <string>

#include "fedtest/nn/classifier.hpp"

namespace fedtest::nn {

/// Two strided convolutions and a fully connected output layer:
///   conv 5x5/2 -> 8 channels, relu, conv 3x3/2 -> 16 channels, relu, fc -> classes.
/// For 1x28x28 inputs this is 8x12x12 -> 16x5x5 -> classes (5 386 parameters
/// for 10 classes).
std::shared_ptr<const Architecture> make_small_cnn(Shape input, std::size_t num_classes,
                                                   std::size_t channels1 = 8,
                                                   std::size_t channels2 = 16);

/// Dense -> tanh -> dense. Smooth everywhere, which keeps finite-difference
/// checks meaningful.
std::shared_ptr<const Architecture> make_mlp(Shape input, std::size_t hidden,
                                             std::size_t num_classes);

/// Small residual network for 3x32x32 inputs: strided stem, two residual
/// stages (16 and 32 channels), global average pooling and a linear head.
std::shared_ptr<const Architecture> make_small_resnet(Shape input, std::size_t num_classes);

/// Builds an architecture by config name: "cnn", "mlp" or "resnet".
std::shared_ptr<const Architecture> make_architecture(const std::string& name, Shape input,
                                                      std::size_t num_classes);

}  // namespace fedtest::nn
