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

#include "fedtest/nn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "fedtest/rng.hpp"

namespace fedtest::nn {

Architecture::Architecture(std::string name, Shape input, std::vector<LayerPtr> layers)
    : name_(std::move(name)), input_(input), layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("architecture without layers");
  Shape cur = input_;
  layout_id_ = name_ + ":" + std::to_string(input.channels) + "x" + std::to_string(input.height) +
               "x" + std::to_string(input.width);
  offsets_.push_back(0);
  for (const auto& layer : layers_) {
    if (!(layer->input_shape() == cur)) {
      throw std::invalid_argument("layer " + layer->tag() + " expects " +
                                  layer->input_shape().str() + " but receives " + cur.str());
    }
    cur = layer->output_shape();
    offsets_.push_back(offsets_.back() + layer->param_count());
    layout_id_ += "-" + layer->tag();
  }
  if (cur.height != 1 || cur.width != 1) {
    throw std::invalid_argument("architecture must end in a flat logit vector");
  }
  num_classes_ = cur.channels;
}

ParamVector Architecture::init_params(std::uint64_t seed) const {
  ParamVector params(layout_id_, param_count());
  Rng rng(seed);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->init(params.values().subspan(offsets_[i], offsets_[i + 1] - offsets_[i]), rng);
  }
  return params;
}

void Architecture::forward(std::span<const double> params, const Tensor& x, Trace& trace) const {
  if (params.size() != param_count()) throw std::invalid_argument("parameter count mismatch");
  if (!(x.shape() == input_)) {
    throw std::invalid_argument("input shape " + x.shape().str() + " != " + input_.str());
  }
  trace.activations.resize(layers_.size() + 1);
  trace.activations[0] = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->forward(params.subspan(offsets_[i], offsets_[i + 1] - offsets_[i]),
                        trace.activations[i], trace.activations[i + 1]);
  }
}

void Architecture::backward(std::span<const double> params, const Trace& trace,
                            const Tensor& grad_logits, std::span<double> grad_params,
                            Tensor* grad_input) const {
  Tensor grad = grad_logits;
  Tensor next;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto p = params.subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
    std::span<double> gp;
    if (!grad_params.empty()) gp = grad_params.subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
    const bool need_input = i > 0 || grad_input != nullptr;
    layers_[i]->backward(p, trace.activations[i], trace.activations[i + 1], grad,
                         need_input ? &next : nullptr, gp);
    if (i == 0) {
      if (grad_input != nullptr) *grad_input = std::move(next);
    } else {
      grad = std::move(next);
    }
  }
}

Tensor softmax(const Tensor& logits) {
  Tensor probs = logits;
  for (std::size_t n = 0; n < probs.batch(); ++n) {
    auto row = probs.sample(n);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return probs;
}

Tensor softmax_backward(const Tensor& probs, const Tensor& grad_probs) {
  Tensor out = grad_probs;
  for (std::size_t n = 0; n < probs.batch(); ++n) {
    auto p = probs.sample(n);
    auto g = out.sample(n);
    double dot = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) dot += p[c] * g[c];
    for (std::size_t c = 0; c < p.size(); ++c) g[c] = p[c] * (g[c] - dot);
  }
  return out;
}

Classifier::Classifier(std::shared_ptr<const Architecture> arch, ParamVector params)
    : arch_(std::move(arch)), params_(std::move(params)) {
  if (!arch_) throw std::invalid_argument("classifier without architecture");
  if (params_.layout_id() != arch_->layout_id() || params_.size() != arch_->param_count()) {
    throw LayoutMismatch("parameters '" + params_.layout_id() + "' do not fit architecture '" +
                         arch_->layout_id() + "'");
  }
}

Classifier::Pass Classifier::forward_pass(const Tensor& x) const {
  Pass pass;
  arch_->forward(params_.values(), x, pass.trace);
  pass.probs = softmax(pass.trace.logits());
  forward_count_ += x.batch();
  return pass;
}

Tensor Classifier::forward(const Tensor& x) const { return forward_pass(x).probs; }

void Classifier::backward_logits(const Pass& pass, const Tensor& grad_logits,
                                 std::span<double> grad_params, Tensor* grad_input) const {
  arch_->backward(params_.values(), pass.trace, grad_logits, grad_params, grad_input);
}

void Classifier::backward_probs(const Pass& pass, const Tensor& grad_probs,
                                std::span<double> grad_params, Tensor* grad_input) const {
  backward_logits(pass, softmax_backward(pass.probs, grad_probs), grad_params, grad_input);
}

std::vector<std::size_t> Classifier::predict_labels(const Tensor& x, std::size_t chunk) const {
  std::vector<std::size_t> labels;
  labels.reserve(x.batch());
  const std::size_t per = x.sample_size();
  Architecture::Trace trace;
  for (std::size_t start = 0; start < x.batch(); start += chunk) {
    const std::size_t n = std::min(chunk, x.batch() - start);
    auto src = x.data().subspan(start * per, n * per);
    Tensor part(n, x.shape(), std::vector<double>(src.begin(), src.end()));
    arch_->forward(params_.values(), part, trace);
    forward_count_ += n;
    const Tensor& logits = trace.logits();
    for (std::size_t i = 0; i < n; ++i) {
      auto row = logits.sample(i);
      labels.push_back(static_cast<std::size_t>(
          std::max_element(row.begin(), row.end()) - row.begin()));
    }
  }
  return labels;
}

}  // namespace fedtest::nn
