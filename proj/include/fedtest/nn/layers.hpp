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
#include <span>
#include <string>
#include <vector>

#include "fedtest/rng.hpp"
#include "fedtest/tensor.hpp"

namespace fedtest::nn {

/// A differentiable stage of a feed-forward network. Layers are stateless:
/// parameters are handed in as a slice of the model's flat ParamVector, so
/// one layer object can be shared by any number of models.
class Layer {
 public:
  virtual ~Layer() = default;

  /// Short tag folded into the architecture's layout id.
  virtual std::string tag() const = 0;
  virtual Shape input_shape() const = 0;
  virtual Shape output_shape() const = 0;
  virtual std::size_t param_count() const { return 0; }
  virtual void init(std::span<double> /*params*/, Rng& /*rng*/) const {}

  virtual void forward(std::span<const double> params, const Tensor& in, Tensor& out) const = 0;

  /// Accumulates parameter gradients into `grad_params` (skipped when empty)
  /// and writes the input gradient into `grad_in` (skipped when null).
  virtual void backward(std::span<const double> params, const Tensor& in, const Tensor& out,
                        const Tensor& grad_out, Tensor* grad_in,
                        std::span<double> grad_params) const = 0;
};

using LayerPtr = std::unique_ptr<const Layer>;

/// 2-D convolution, weights laid out (out, in, kh, kw) followed by bias.
class Conv2d final : public Layer {
 public:
  Conv2d(Shape input, std::size_t out_channels, std::size_t kernel, std::size_t stride,
         std::size_t padding);

  std::string tag() const override;
  Shape input_shape() const override { return input_; }
  Shape output_shape() const override { return output_; }
  std::size_t param_count() const override;
  void init(std::span<double> params, Rng& rng) const override;
  void forward(std::span<const double> params, const Tensor& in, Tensor& out) const override;
  void backward(std::span<const double> params, const Tensor& in, const Tensor& out,
                const Tensor& grad_out, Tensor* grad_in,
                std::span<double> grad_params) const override;

 private:
  Shape input_;
  Shape output_;
  std::size_t kernel_;
  std::size_t stride_;
  std::size_t padding_;
};

/// Fully connected layer over the flattened input, weights (out, in) then bias.
class Linear final : public Layer {
 public:
  Linear(Shape input, std::size_t out_features);

  std::string tag() const override;
  Shape input_shape() const override { return input_; }
  Shape output_shape() const override { return {out_, 1, 1}; }
  std::size_t param_count() const override;
  void init(std::span<double> params, Rng& rng) const override;
  void forward(std::span<const double> params, const Tensor& in, Tensor& out) const override;
  void backward(std::span<const double> params, const Tensor& in, const Tensor& out,
                const Tensor& grad_out, Tensor* grad_in,
                std::span<double> grad_params) const override;

 private:
  Shape input_;
  std::size_t out_;
};

class Relu final : public Layer {
 public:
  explicit Relu(Shape shape) : shape_(shape) {}
  std::string tag() const override { return "relu"; }
  Shape input_shape() const override { return shape_; }
  Shape output_shape() const override { return shape_; }
  void forward(std::span<const double> params, const Tensor& in, Tensor& out) const override;
  void backward(std::span<const double> params, const Tensor& in, const Tensor& out,
                const Tensor& grad_out, Tensor* grad_in,
                std::span<double> grad_params) const override;

 private:
  Shape shape_;
};

class Tanh final : public Layer {
 public:
  explicit Tanh(Shape shape) : shape_(shape) {}
  std::string tag() const override { return "tanh"; }
  Shape input_shape() const override { return shape_; }
  Shape output_shape() const override { return shape_; }
  void forward(std::span<const double> params, const Tensor& in, Tensor& out) const override;
  void backward(std::span<const double> params, const Tensor& in, const Tensor& out,
                const Tensor& grad_out, Tensor* grad_in,
                std::span<double> grad_params) const override;

 private:
  Shape shape_;
};

/// Averages each channel over its spatial extent.
class GlobalAvgPool final : public Layer {
 public:
  explicit GlobalAvgPool(Shape input) : input_(input) {}
  std::string tag() const override { return "gap"; }
  Shape input_shape() const override { return input_; }
  Shape output_shape() const override { return {input_.channels, 1, 1}; }
  void forward(std::span<const double> params, const Tensor& in, Tensor& out) const override;
  void backward(std::span<const double> params, const Tensor& in, const Tensor& out,
                const Tensor& grad_out, Tensor* grad_in,
                std::span<double> grad_params) const override;

 private:
  Shape input_;
};

/// relu(x + conv(relu(conv(x)))) with two shape-preserving 3x3 convolutions.
class ResidualBlock final : public Layer {
 public:
  explicit ResidualBlock(Shape shape);

  std::string tag() const override;
  Shape input_shape() const override { return shape_; }
  Shape output_shape() const override { return shape_; }
  std::size_t param_count() const override;
  void init(std::span<double> params, Rng& rng) const override;
  void forward(std::span<const double> params, const Tensor& in, Tensor& out) const override;
  void backward(std::span<const double> params, const Tensor& in, const Tensor& out,
                const Tensor& grad_out, Tensor* grad_in,
                std::span<double> grad_params) const override;

 private:
  Shape shape_;
  Conv2d first_;
  Conv2d second_;
};

}  // namespace fedtest::nn
