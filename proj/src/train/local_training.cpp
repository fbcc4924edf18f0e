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

#include "fedtest/train/local_training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fedtest/rng.hpp"

namespace fedtest::train {
namespace {

struct Objective {
  double alpha = 1.0;  // weight of the classification loss
  const ParamVector* anchor = nullptr;
  AnchorMetric metric = AnchorMetric::kSquaredL2;
  const data::BackdoorSpec* poison = nullptr;
  const data::LabeledDataset* semantic_source = nullptr;
};

TrainReport run_sgd(const nn::Classifier& start, const data::LabeledDataset& local_data,
                    const TrainingHyper& hyper, std::uint64_t seed, const Objective& objective) {
  hyper.validate();
  TrainReport report;
  report.update = ParamVector(start.params().layout_id(), start.params().size());
  if (local_data.empty()) {
    report.warning = "empty local dataset; returning a zero update";
    return report;
  }

  nn::Classifier model(start.architecture_ptr(), start.params());
  const std::size_t num_classes = model.num_classes();
  const std::size_t p = model.params().size();
  std::vector<double> grad(p);
  std::vector<double> velocity(p, 0.0);
  std::vector<std::size_t> order(local_data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = make_rng(seed, Stream::kLocalTraining);

  for (std::size_t epoch = 0; epoch < hyper.local_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start_idx = 0, batch_no = 0; start_idx < order.size();
         start_idx += hyper.batch_size, ++batch_no) {
      const std::size_t n = std::min(hyper.batch_size, order.size() - start_idx);
      data::LabeledDataset batch =
          local_data.subset(std::span<const std::size_t>(order).subspan(start_idx, n));
      if (objective.poison != nullptr) {
        batch = data::poison_batch(std::move(batch), *objective.poison,
                                   derive_seed(seed, Stream::kPoison, {epoch, batch_no}),
                                   objective.semantic_source);
      }

      const auto pass = model.forward_pass(batch.images);
      Tensor grad_logits = pass.probs;
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto row = grad_logits.sample(i);
        row[static_cast<std::size_t>(batch.labels[i])] -= 1.0;
        for (std::size_t c = 0; c < num_classes; ++c) row[c] *= inv_n;
      }
      if (objective.alpha != 1.0) {
        for (double& g : grad_logits.data()) g *= objective.alpha;
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      model.backward_logits(pass, grad_logits, grad, nullptr);

      auto w = model.params().values();
      if (objective.anchor != nullptr && objective.alpha != 1.0) {
        const double beta = 1.0 - objective.alpha;
        const auto g0 = objective.anchor->values();
        if (objective.metric == AnchorMetric::kSquaredL2) {
          for (std::size_t j = 0; j < p; ++j) grad[j] += beta * 2.0 * (w[j] - g0[j]);
        } else {
          double dist = 0.0;
          for (std::size_t j = 0; j < p; ++j) dist += (w[j] - g0[j]) * (w[j] - g0[j]);
          dist = std::sqrt(dist);
          if (dist > 0.0) {
            for (std::size_t j = 0; j < p; ++j) grad[j] += beta * (w[j] - g0[j]) / dist;
          }
        }
      }
      for (std::size_t j = 0; j < p; ++j) {
        const double d = grad[j] + hyper.weight_decay * w[j];
        velocity[j] = hyper.momentum * velocity[j] + d;
        w[j] -= hyper.learning_rate * velocity[j];
      }
      ++report.steps;
    }
  }
  report.update = model.params() - start.params();
  return report;
}

}  // namespace

void TrainingHyper::validate() const {
  if (local_epochs == 0 || batch_size == 0) {
    throw std::invalid_argument("training: epochs and batch size must be positive");
  }
  if (learning_rate < 0.0 || momentum < 0.0 || weight_decay < 0.0) {
    throw std::invalid_argument("training: negative optimizer hyper-parameter");
  }
}

std::string to_string(AnchorMetric metric) {
  return metric == AnchorMetric::kSquaredL2 ? "squared_l2" : "l2";
}

AnchorMetric anchor_metric_from_string(const std::string& s) {
  if (s == "squared_l2") return AnchorMetric::kSquaredL2;
  if (s == "l2") return AnchorMetric::kL2;
  throw std::invalid_argument("unknown anchor metric '" + s + "'");
}

TrainReport train_benign(const nn::Classifier& model, const data::LabeledDataset& local_data,
                         const TrainingHyper& hyper, std::uint64_t seed) {
  return run_sgd(model, local_data, hyper, seed, Objective{});
}

TrainReport train_adversarial(const nn::Classifier& model, const data::LabeledDataset& local_data,
                              const AttackConfig& attack, const ParamVector& prior_global,
                              const TrainingHyper& hyper, std::uint64_t seed,
                              const data::LabeledDataset* semantic_source) {
  if (attack.alpha < 0.0 || attack.alpha > 1.0) {
    throw std::invalid_argument("attack alpha must lie in [0,1]");
  }
  model.params().check_compatible(prior_global);
  Objective objective;
  objective.alpha = attack.alpha;
  objective.anchor = &prior_global;
  objective.metric = attack.anchor;
  objective.poison = &attack.backdoor;
  objective.semantic_source = semantic_source;
  return run_sgd(model, local_data, hyper, seed, objective);
}

ParamVector scale_update(const ParamVector& update, double gamma, std::size_t colluders) {
  if (colluders == 0) throw std::invalid_argument("scale_update: colluder count must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("scale_update: gamma must be positive");
  ParamVector out = update;
  out *= gamma / static_cast<double>(colluders);
  return out;
}

double mean_cross_entropy(const nn::Classifier& model, const data::LabeledDataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("cross-entropy over an empty dataset");
  const auto probs = model.forward(dataset.images);
  double total = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const double p = probs.sample(i)[static_cast<std::size_t>(dataset.labels[i])];
    total -= std::log(std::max(p, 1e-300));
  }
  return total / static_cast<double>(dataset.size());
}

}  // namespace fedtest::train
