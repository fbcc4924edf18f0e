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

#include "fedtest/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedtest::nn {
namespace {

struct Range {
  std::size_t lo = 0;
  std::size_t hi = 0;  // exclusive
};

// Output positions o for which o * stride + k - pad lands inside [0, in_len).
Range valid_range(std::size_t out_len, std::size_t in_len, std::size_t stride, std::size_t pad,
                  std::size_t k) {
  const long off = static_cast<long>(k) - static_cast<long>(pad);
  const long s = static_cast<long>(stride);
  long lo = 0;
  if (off < 0) lo = (-off + s - 1) / s;
  const long last = static_cast<long>(in_len) - 1 - off;
  if (last < 0) return {};
  const long hi = std::min(static_cast<long>(out_len), last / s + 1);
  if (hi <= lo) return {};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

void uniform_fill(std::span<double> xs, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& x : xs) x = dist(rng);
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(Shape input, std::size_t out_channels, std::size_t kernel, std::size_t stride,
               std::size_t padding)
    : input_(input), kernel_(kernel), stride_(stride), padding_(padding) {
  if (kernel == 0 || stride == 0) throw std::invalid_argument("conv: kernel and stride must be > 0");
  if (input.height + 2 * padding < kernel || input.width + 2 * padding < kernel) {
    throw std::invalid_argument("conv: kernel larger than padded input " + input.str());
  }
  output_ = {out_channels, (input.height + 2 * padding - kernel) / stride + 1,
             (input.width + 2 * padding - kernel) / stride + 1};
}

std::string Conv2d::tag() const {
  return "c" + std::to_string(output_.channels) + "k" + std::to_string(kernel_) + "s" +
         std::to_string(stride_) + "p" + std::to_string(padding_);
}

std::size_t Conv2d::param_count() const {
  return output_.channels * input_.channels * kernel_ * kernel_ + output_.channels;
}

void Conv2d::init(std::span<double> params, Rng& rng) const {
  const double fan_in = static_cast<double>(input_.channels * kernel_ * kernel_);
  uniform_fill(params, 1.0 / std::sqrt(fan_in), rng);
}

void Conv2d::forward(std::span<const double> params, const Tensor& in, Tensor& out) const {
  const std::size_t ic_n = input_.channels, ih_n = input_.height, iw_n = input_.width;
  const std::size_t oc_n = output_.channels, oh_n = output_.height, ow_n = output_.width;
  const std::size_t k = kernel_, s = stride_, p = padding_;
  const double* w = params.data();
  const double* bias = w + oc_n * ic_n * k * k;
  out = Tensor(in.batch(), output_);

  for (std::size_t n = 0; n < in.batch(); ++n) {
    const double* x = in.sample(n).data();
    double* y = out.sample(n).data();
    for (std::size_t oc = 0; oc < oc_n; ++oc) {
      double* yo = y + oc * oh_n * ow_n;
      std::fill(yo, yo + oh_n * ow_n, bias[oc]);
      for (std::size_t ic = 0; ic < ic_n; ++ic) {
        const double* xc = x + ic * ih_n * iw_n;
        for (std::size_t kh = 0; kh < k; ++kh) {
          const Range rh = valid_range(oh_n, ih_n, s, p, kh);
          for (std::size_t kw = 0; kw < k; ++kw) {
            const Range rw = valid_range(ow_n, iw_n, s, p, kw);
            const double wv = w[((oc * ic_n + ic) * k + kh) * k + kw];
            for (std::size_t oh = rh.lo; oh < rh.hi; ++oh) {
              const double* xrow = xc + (oh * s + kh - p) * iw_n;
              double* yrow = yo + oh * ow_n;
              for (std::size_t ow = rw.lo; ow < rw.hi; ++ow) yrow[ow] += wv * xrow[ow * s + kw - p];
            }
          }
        }
      }
    }
  }
}

void Conv2d::backward(std::span<const double> params, const Tensor& in, const Tensor& /*out*/,
                      const Tensor& grad_out, Tensor* grad_in,
                      std::span<double> grad_params) const {
  const std::size_t ic_n = input_.channels, ih_n = input_.height, iw_n = input_.width;
  const std::size_t oc_n = output_.channels, oh_n = output_.height, ow_n = output_.width;
  const std::size_t k = kernel_, s = stride_, p = padding_;
  const double* w = params.data();
  const bool want_params = !grad_params.empty();
  double* gw = want_params ? grad_params.data() : nullptr;
  double* gb = want_params ? gw + oc_n * ic_n * k * k : nullptr;
  if (grad_in != nullptr) *grad_in = Tensor(in.batch(), input_);

  for (std::size_t n = 0; n < in.batch(); ++n) {
    const double* x = in.sample(n).data();
    const double* gy = grad_out.sample(n).data();
    double* gx = grad_in != nullptr ? grad_in->sample(n).data() : nullptr;
    for (std::size_t oc = 0; oc < oc_n; ++oc) {
      const double* gyo = gy + oc * oh_n * ow_n;
      if (want_params) {
        double acc = 0.0;
        for (std::size_t i = 0; i < oh_n * ow_n; ++i) acc += gyo[i];
        gb[oc] += acc;
      }
      for (std::size_t ic = 0; ic < ic_n; ++ic) {
        const double* xc = x + ic * ih_n * iw_n;
        double* gxc = gx != nullptr ? gx + ic * ih_n * iw_n : nullptr;
        for (std::size_t kh = 0; kh < k; ++kh) {
          const Range rh = valid_range(oh_n, ih_n, s, p, kh);
          for (std::size_t kw = 0; kw < k; ++kw) {
            const Range rw = valid_range(ow_n, iw_n, s, p, kw);
            const std::size_t widx = ((oc * ic_n + ic) * k + kh) * k + kw;
            const double wv = w[widx];
            double acc = 0.0;
            for (std::size_t oh = rh.lo; oh < rh.hi; ++oh) {
              const std::size_t row = (oh * s + kh - p) * iw_n;
              const double* xrow = xc + row;
              const double* gyrow = gyo + oh * ow_n;
              if (gxc != nullptr) {
                double* gxrow = gxc + row;
                for (std::size_t ow = rw.lo; ow < rw.hi; ++ow) {
                  acc += gyrow[ow] * xrow[ow * s + kw - p];
                  gxrow[ow * s + kw - p] += wv * gyrow[ow];
                }
              } else {
                for (std::size_t ow = rw.lo; ow < rw.hi; ++ow) acc += gyrow[ow] * xrow[ow * s + kw - p];
              }
            }
            if (want_params) gw[widx] += acc;
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------- Linear

Linear::Linear(Shape input, std::size_t out_features) : input_(input), out_(out_features) {
  if (out_features == 0) throw std::invalid_argument("linear: zero output features");
}

std::string Linear::tag() const { return "fc" + std::to_string(out_); }

std::size_t Linear::param_count() const { return out_ * input_.volume() + out_; }

void Linear::init(std::span<double> params, Rng& rng) const {
  uniform_fill(params, 1.0 / std::sqrt(static_cast<double>(input_.volume())), rng);
}

void Linear::forward(std::span<const double> params, const Tensor& in, Tensor& out) const {
  const std::size_t in_n = input_.volume();
  const double* w = params.data();
  const double* bias = w + out_ * in_n;
  out = Tensor(in.batch(), output_shape());
  for (std::size_t n = 0; n < in.batch(); ++n) {
    const double* x = in.sample(n).data();
    double* y = out.sample(n).data();
    for (std::size_t o = 0; o < out_; ++o) {
      const double* wr = w + o * in_n;
      double acc = bias[o];
      for (std::size_t i = 0; i < in_n; ++i) acc += wr[i] * x[i];
      y[o] = acc;
    }
  }
}

void Linear::backward(std::span<const double> params, const Tensor& in, const Tensor& /*out*/,
                      const Tensor& grad_out, Tensor* grad_in,
                      std::span<double> grad_params) const {
  const std::size_t in_n = input_.volume();
  const double* w = params.data();
  const bool want_params = !grad_params.empty();
  if (grad_in != nullptr) *grad_in = Tensor(in.batch(), input_);
  for (std::size_t n = 0; n < in.batch(); ++n) {
    const double* x = in.sample(n).data();
    const double* gy = grad_out.sample(n).data();
    double* gx = grad_in != nullptr ? grad_in->sample(n).data() : nullptr;
    for (std::size_t o = 0; o < out_; ++o) {
      const double g = gy[o];
      if (g == 0.0) continue;
      if (want_params) {
        double* gw = grad_params.data() + o * in_n;
        for (std::size_t i = 0; i < in_n; ++i) gw[i] += g * x[i];
        grad_params[out_ * in_n + o] += g;
      }
      if (gx != nullptr) {
        const double* wr = w + o * in_n;
        for (std::size_t i = 0; i < in_n; ++i) gx[i] += g * wr[i];
      }
    }
  }
}

// ---------------------------------------------------------------- activations

void Relu::forward(std::span<const double>, const Tensor& in, Tensor& out) const {
  out = in;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
}

void Relu::backward(std::span<const double>, const Tensor& in, const Tensor&,
                    const Tensor& grad_out, Tensor* grad_in, std::span<double>) const {
  if (grad_in == nullptr) return;
  *grad_in = grad_out;
  auto x = in.data();
  auto g = grad_in->data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(x[i] > 0.0)) g[i] = 0.0;
  }
}

void Tanh::forward(std::span<const double>, const Tensor& in, Tensor& out) const {
  out = in;
  for (double& v : out.data()) v = std::tanh(v);
}

void Tanh::backward(std::span<const double>, const Tensor&, const Tensor& out,
                    const Tensor& grad_out, Tensor* grad_in, std::span<double>) const {
  if (grad_in == nullptr) return;
  *grad_in = grad_out;
  auto y = out.data();
  auto g = grad_in->data();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - y[i] * y[i];
}

void GlobalAvgPool::forward(std::span<const double>, const Tensor& in, Tensor& out) const {
  const std::size_t area = input_.height * input_.width;
  out = Tensor(in.batch(), output_shape());
  for (std::size_t n = 0; n < in.batch(); ++n) {
    auto x = in.sample(n);
    auto y = out.sample(n);
    for (std::size_t c = 0; c < input_.channels; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < area; ++i) acc += x[c * area + i];
      y[c] = acc / static_cast<double>(area);
    }
  }
}

void GlobalAvgPool::backward(std::span<const double>, const Tensor& in, const Tensor&,
                             const Tensor& grad_out, Tensor* grad_in, std::span<double>) const {
  if (grad_in == nullptr) return;
  const std::size_t area = input_.height * input_.width;
  *grad_in = Tensor(in.batch(), input_);
  for (std::size_t n = 0; n < in.batch(); ++n) {
    auto gy = grad_out.sample(n);
    auto gx = grad_in->sample(n);
    for (std::size_t c = 0; c < input_.channels; ++c) {
      const double g = gy[c] / static_cast<double>(area);
      for (std::size_t i = 0; i < area; ++i) gx[c * area + i] = g;
    }
  }
}

// ---------------------------------------------------------------- ResidualBlock

ResidualBlock::ResidualBlock(Shape shape)
    : shape_(shape), first_(shape, shape.channels, 3, 1, 1), second_(shape, shape.channels, 3, 1, 1) {}

std::string ResidualBlock::tag() const { return "res" + std::to_string(shape_.channels); }

std::size_t ResidualBlock::param_count() const {
  return first_.param_count() + second_.param_count();
}

void ResidualBlock::init(std::span<double> params, Rng& rng) const {
  first_.init(params.first(first_.param_count()), rng);
  second_.init(params.subspan(first_.param_count()), rng);
}

void ResidualBlock::forward(std::span<const double> params, const Tensor& in, Tensor& out) const {
  Tensor a, h;
  first_.forward(params.first(first_.param_count()), in, a);
  for (double& v : a.data()) v = v > 0.0 ? v : 0.0;
  second_.forward(params.subspan(first_.param_count()), a, h);
  out = in;
  auto o = out.data();
  auto hv = h.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double v = o[i] + hv[i];
    o[i] = v > 0.0 ? v : 0.0;
  }
}

void ResidualBlock::backward(std::span<const double> params, const Tensor& in, const Tensor& out,
                             const Tensor& grad_out, Tensor* grad_in,
                             std::span<double> grad_params) const {
  const auto p1 = params.first(first_.param_count());
  const auto p2 = params.subspan(first_.param_count());
  // Recompute the inner activations instead of caching them per call.
  Tensor pre, a, h;
  first_.forward(p1, in, pre);
  a = pre;
  for (double& v : a.data()) v = v > 0.0 ? v : 0.0;
  second_.forward(p2, a, h);

  Tensor g_sum = grad_out;
  {
    auto g = g_sum.data();
    auto y = out.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(y[i] > 0.0)) g[i] = 0.0;
    }
  }
  std::span<double> g1, g2;
  if (!grad_params.empty()) {
    g1 = grad_params.first(first_.param_count());
    g2 = grad_params.subspan(first_.param_count());
  }
  Tensor g_a;
  second_.backward(p2, a, h, g_sum, &g_a, g2);
  {
    auto g = g_a.data();
    auto x = pre.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(x[i] > 0.0)) g[i] = 0.0;
    }
  }
  const bool want_input = grad_in != nullptr;
  Tensor g_in;
  first_.backward(p1, in, pre, g_a, want_input ? &g_in : nullptr, g1);
  if (want_input) {
    auto gi = g_in.data();
    auto gs = g_sum.data();
    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += gs[i];
    *grad_in = std::move(g_in);
  }
}

}  // namespace fedtest::nn
