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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fedtest/nn/layers.hpp"
#include "fedtest/param_vector.hpp"
#include "fedtest/tensor.hpp"

namespace fedtest::nn {

/// Immutable description of a network: its layer stack, input shape and
/// the parameter layout. Shared between every model of one FL run.
class Architecture {
 public:
  Architecture(std::string name, Shape input, std::vector<LayerPtr> layers);

  const std::string& name() const { return name_; }
  /// Identifies the flattened parameter layout; see ParamVector.
  const std::string& layout_id() const { return layout_id_; }
  Shape input_shape() const { return input_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t param_count() const { return offsets_.back(); }
  std::size_t layer_count() const { return layers_.size(); }

  ParamVector init_params(std::uint64_t seed) const;

  /// Activations of every stage; activations[0] is the input, the last
  /// entry holds the logits.
  struct Trace {
    std::vector<Tensor> activations;
    const Tensor& logits() const { return activations.back(); }
  };

  void forward(std::span<const double> params, const Tensor& x, Trace& trace) const;
  void backward(std::span<const double> params, const Trace& trace, const Tensor& grad_logits,
                std::span<double> grad_params, Tensor* grad_input) const;

 private:
  std::string name_;
  std::string layout_id_;
  Shape input_;
  std::size_t num_classes_ = 0;
  std::vector<LayerPtr> layers_;
  std::vector<std::size_t> offsets_;
};

/// Row-wise softmax of an (n, C) logit batch.
Tensor softmax(const Tensor& logits);

/// Chain rule through softmax: given dJ/dp for p = softmax(z), returns dJ/dz.
Tensor softmax_backward(const Tensor& probs, const Tensor& grad_probs);

/// A model: shared architecture plus its own parameters. forward() returns
/// per-image softmax probabilities. Gradients are available with respect to
/// both parameters and input pixels. Not safe for concurrent use.
class Classifier {
 public:
  Classifier(std::shared_ptr<const Architecture> arch, ParamVector params);

  const Architecture& architecture() const { return *arch_; }
  std::shared_ptr<const Architecture> architecture_ptr() const { return arch_; }
  const ParamVector& params() const { return params_; }
  ParamVector& params() { return params_; }
  std::size_t num_classes() const { return arch_->num_classes(); }

  struct Pass {
    Architecture::Trace trace;
    Tensor probs;
  };

  Tensor forward(const Tensor& x) const;
  Pass forward_pass(const Tensor& x) const;

  /// Backpropagates dJ/dlogits. Parameter gradients are accumulated into
  /// `grad_params` when it is non-empty.
  void backward_logits(const Pass& pass, const Tensor& grad_logits, std::span<double> grad_params,
                       Tensor* grad_input) const;
  /// Backpropagates dJ/dprobs through the softmax.
  void backward_probs(const Pass& pass, const Tensor& grad_probs, std::span<double> grad_params,
                      Tensor* grad_input) const;

  std::vector<std::size_t> predict_labels(const Tensor& x, std::size_t chunk = 256) const;

  /// Number of single-image forward evaluations performed so far.
  std::size_t forward_count() const { return forward_count_; }
  void reset_forward_count() { forward_count_ = 0; }

 private:
  std::shared_ptr<const Architecture> arch_;
  ParamVector params_;
  mutable std::size_t forward_count_ = 0;
};

}  // namespace fedtest::nn
