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

#include "fedtest/defense/difftest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "fedtest/rng.hpp"

namespace fedtest::defense {
namespace {

constexpr std::size_t kMaxLloydIterations = 100;

using Passes = std::vector<nn::Classifier::Pass>;

Passes forward_all(std::span<const nn::Classifier* const> models, const Tensor& x) {
  Passes passes;
  passes.reserve(models.size());
  for (const auto* m : models) passes.push_back(m->forward_pass(x));
  return passes;
}

Matrix average_rows(const Passes& passes, std::size_t num_classes) {
  Matrix preds = Matrix::Zero(static_cast<Eigen::Index>(passes.size()),
                              static_cast<Eigen::Index>(num_classes));
  for (std::size_t i = 0; i < passes.size(); ++i) {
    const Tensor& probs = passes[i].probs;
    for (std::size_t n = 0; n < probs.batch(); ++n) {
      auto row = probs.sample(n);
      for (std::size_t c = 0; c < num_classes; ++c) preds(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) += row[c];
    }
    preds.row(static_cast<Eigen::Index>(i)) /= static_cast<double>(probs.batch());
  }
  return preds;
}

// Center of the projected rows listed in `members`.
Vector center_of(const Matrix& points, const std::vector<std::size_t>& members) {
  Vector mu = Vector::Zero(points.cols());
  for (std::size_t i : members) mu += points.row(static_cast<Eigen::Index>(i)).transpose();
  if (!members.empty()) mu /= static_cast<double>(members.size());
  return mu;
}

double within_sse(const Matrix& points, const std::vector<std::size_t>& members, const Vector& mu) {
  double s = 0.0;
  for (std::size_t i : members) s += (points.row(static_cast<Eigen::Index>(i)).transpose() - mu).squaredNorm();
  return s;
}

Tensor gradient_from_passes(std::span<const nn::Classifier* const> models, const Passes& passes,
                            const Tensor& x, const PcaMap& map, const ClusterResult& clusters) {
  Tensor grad(x.batch(), x.shape());
  if (clusters.degenerate || clusters.minority.empty()) return grad;
  const Vector diff = clusters.mu1 - clusters.mu2;
  const double dist = diff.norm();
  if (!(dist > 0.0)) return grad;
  const Vector unit = diff / dist;
  const double n1 = static_cast<double>(clusters.majority.size());
  const double n2 = static_cast<double>(clusters.minority.size());
  const double inv_batch = 1.0 / static_cast<double>(x.batch());

  auto backprop = [&](std::size_t i, double weight) {
    // dJ/dpbar_i = components * (weight * unit); spread evenly over the batch.
    const Vector g_pbar = map.components * (weight * unit);
    Tensor grad_probs(x.batch(), passes[i].probs.shape());
    for (std::size_t n = 0; n < x.batch(); ++n) {
      auto row = grad_probs.sample(n);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = g_pbar(static_cast<Eigen::Index>(c)) * inv_batch;
    }
    Tensor g_in;
    models[i]->backward_probs(passes[i], grad_probs, {}, &g_in);
    auto dst = grad.data();
    auto src = g_in.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  };
  for (std::size_t i : clusters.majority) backprop(i, 1.0 / n1);
  for (std::size_t i : clusters.minority) backprop(i, -1.0 / n2);
  return grad;
}

Tensor clamp_step(const Tensor& x, const Tensor& grad, double step_size) {
  Tensor out = x;
  auto o = out.data();
  auto g = grad.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = std::clamp(o[k] + step_size * g[k], 0.0, 1.0);
  return out;
}

}  // namespace

void DiffTestConfig::validate(std::size_t num_models, std::size_t num_classes) const {
  if (!(step_size > 0.0)) throw std::invalid_argument("difftest: step size must be positive");
  if (iterations < 1) throw std::invalid_argument("difftest: need at least one iteration");
  if (pca_dims < 1 || pca_dims > std::min(num_models, num_classes)) {
    throw std::invalid_argument("difftest: PCA dimension must lie in [1, min(K, C)]");
  }
}

bool ClusterResult::is_minority(std::size_t i) const {
  return std::find(minority.begin(), minority.end(), i) != minority.end();
}

Matrix mean_softmax_predictions(std::span<const nn::Classifier* const> models, const Tensor& x) {
  if (x.batch() == 0) throw std::invalid_argument("mean_softmax_predictions: empty batch");
  if (models.empty()) throw std::invalid_argument("mean_softmax_predictions: no models");
  return average_rows(forward_all(models, x), models.front()->num_classes());
}

PcaProjection pca_project(const Matrix& preds, std::size_t d) {
  const auto k = static_cast<std::size_t>(preds.rows());
  const auto c = static_cast<std::size_t>(preds.cols());
  if (k < 2) throw std::invalid_argument("pca_project: need at least two rows");
  if (d < 1 || d > std::min(k, c)) throw std::invalid_argument("pca_project: d outside [1, min(K, C)]");

  PcaProjection out;
  out.map.mean = preds.colwise().mean();
  const Matrix centered = preds.rowwise() - out.map.mean;
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeFullV);
  Matrix comps = svd.matrixV().leftCols(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < comps.cols(); ++j) {
    Eigen::Index arg = 0;
    comps.col(j).cwiseAbs().maxCoeff(&arg);
    if (comps(arg, j) < 0.0) comps.col(j) = -comps.col(j);
  }
  out.map.components = comps;
  out.map.explained_variance = Vector::Zero(static_cast<Eigen::Index>(d));
  const auto& sv = svd.singularValues();
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d) && j < sv.size(); ++j) {
    out.map.explained_variance(j) = sv(j) * sv(j) / static_cast<double>(k - 1);
  }
  out.points = centered * comps;
  return out;
}

ClusterResult cluster_two(const Matrix& points, std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(points.rows());
  if (k < 2) throw std::invalid_argument("cluster_two: need at least two points");
  auto row = [&](std::size_t i) { return points.row(static_cast<Eigen::Index>(i)).transpose(); };

  // Farthest pair; exact ties broken by a seeded draw.
  double best = -1.0;
  std::vector<std::pair<std::size_t, std::size_t>> best_pairs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d = (row(i) - row(j)).squaredNorm();
      if (d > best) {
        best = d;
        best_pairs.assign(1, {i, j});
      } else if (d == best) {
        best_pairs.emplace_back(i, j);
      }
    }
  }

  ClusterResult result;
  if (!(best > 0.0)) {
    result.degenerate = true;
    for (std::size_t i = 0; i < k; ++i) result.majority.push_back(i);
    result.mu1 = center_of(points, result.majority);
    result.mu2 = result.mu1;
    result.majority_std = Vector::Zero(points.cols());
    return result;
  }
  std::pair<std::size_t, std::size_t> init = best_pairs.front();
  if (best_pairs.size() > 1) {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, best_pairs.size() - 1);
    init = best_pairs[pick(rng)];
  }

  Vector centers[2] = {row(init.first), row(init.second)};
  std::vector<int> assign(k, -1);
  for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double d0 = (row(i) - centers[0]).squaredNorm();
      const double d1 = (row(i) - centers[1]).squaredNorm();
      const int a = d1 < d0 ? 1 : 0;
      if (a != assign[i]) {
        assign[i] = a;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed) break;
    for (int c = 0; c < 2; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < k; ++i) {
        if (assign[i] == c) members.push_back(i);
      }
      if (!members.empty()) centers[c] = center_of(points, members);
    }
  }

  std::vector<std::size_t> groups[2];
  for (std::size_t i = 0; i < k; ++i) groups[assign[i]].push_back(i);
  int major = 0;
  if (groups[1].size() > groups[0].size()) {
    major = 1;
  } else if (groups[1].size() == groups[0].size()) {
    const double sse0 = within_sse(points, groups[0], center_of(points, groups[0]));
    const double sse1 = within_sse(points, groups[1], center_of(points, groups[1]));
    if (sse1 < sse0 || (sse1 == sse0 && groups[1].front() < groups[0].front())) major = 1;
  }
  result.majority = groups[major];
  result.minority = groups[1 - major];
  result.mu1 = center_of(points, result.majority);
  result.mu2 = result.minority.empty() ? result.mu1 : center_of(points, result.minority);

  Vector var = Vector::Zero(points.cols());
  for (std::size_t i : result.majority) var += (row(i) - result.mu1).cwiseAbs2();
  var /= static_cast<double>(result.majority.size());
  result.majority_std = var.cwiseSqrt();
  result.degenerate = result.minority.empty() || !((result.mu1 - result.mu2).norm() > 0.0);
  return result;
}

double cluster_separation(std::span<const nn::Classifier* const> models, const Tensor& x,
                          const PcaMap& map, const ClusterResult& clusters) {
  const Matrix preds = mean_softmax_predictions(models, x);
  const Matrix projected = (preds.rowwise() - map.mean) * map.components;
  return (center_of(projected, clusters.majority) - center_of(projected, clusters.minority)).norm();
}

Tensor separation_gradient(std::span<const nn::Classifier* const> models, const Tensor& x,
                           const PcaMap& map, const ClusterResult& clusters) {
  const Passes passes = forward_all(models, x);
  // Centers must come from the current predictions for the chain rule to
  // match cluster_separation at this X.
  ClusterResult at_x = clusters;
  const Matrix projected =
      (average_rows(passes, models.front()->num_classes()).rowwise() - map.mean) * map.components;
  at_x.mu1 = center_of(projected, clusters.majority);
  at_x.mu2 = center_of(projected, clusters.minority);
  return gradient_from_passes(models, passes, x, map, at_x);
}

Tensor differential_step(const Tensor& x, std::span<const nn::Classifier* const> models,
                         const PcaMap& map, const ClusterResult& clusters, double step_size) {
  if (!(step_size > 0.0)) throw std::invalid_argument("differential_step: step size must be positive");
  if (clusters.degenerate) return x;
  return clamp_step(x, separation_gradient(models, x, map, clusters), step_size);
}

ClassScores score_clusters(const ClusterResult& clusters) {
  if (clusters.degenerate) return {};
  return {2.0 * clusters.majority_std.norm(), clusters.center_distance()};
}

DiffTestResult generate_diff_inputs_and_scores(const data::LabeledDataset& seeds,
                                               std::span<const nn::Classifier* const> models,
                                               std::span<const std::size_t> agent_ids,
                                               const DiffTestConfig& config, std::uint64_t seed) {
  if (seeds.empty()) throw std::invalid_argument("difftest: no seed images");
  if (models.size() < 2) throw std::invalid_argument("difftest: need at least two models");
  if (agent_ids.size() != models.size()) throw std::invalid_argument("difftest: agent id count mismatch");
  const std::size_t num_classes = models.front()->num_classes();
  config.validate(models.size(), num_classes);

  std::vector<int> classes(seeds.labels.begin(), seeds.labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  DiffTestResult result;
  result.scores.class_ids = classes;
  result.scores.agent_ids.assign(agent_ids.begin(), agent_ids.end());
  result.scores.values = Matrix::Zero(static_cast<Eigen::Index>(classes.size()),
                                      static_cast<Eigen::Index>(models.size()));
  std::vector<double> generated;
  std::vector<int> generated_labels;

  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const int cls = classes[ci];
    const auto members = seeds.indices_of(cls);
    Tensor x = seeds.subset(members).images;

    ClassOutcome outcome;
    outcome.class_id = cls;
    for (std::size_t it = 0; it < config.iterations; ++it) {
      const Passes passes = forward_all(models, x);
      const Matrix preds = average_rows(passes, num_classes);
      PcaProjection pca = pca_project(preds, config.pca_dims);
      ClusterResult clusters = cluster_two(
          pca.points, derive_seed(seed, Stream::kDefense, {static_cast<std::uint64_t>(cls), it}));
      if (!clusters.degenerate) {
        x = clamp_step(x, gradient_from_passes(models, passes, x, pca.map, clusters),
                       config.step_size);
      }
      outcome.clusters = std::move(clusters);
      outcome.projected = std::move(pca.points);
    }

    const auto& cl = outcome.clusters;
    if (!cl.degenerate) {
      const auto s = score_clusters(cl);
      outcome.majority_score = s.majority;
      outcome.minority_score = s.minority;
      for (std::size_t i : cl.majority) {
        result.scores.values(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(i)) = outcome.majority_score;
      }
      for (std::size_t i : cl.minority) {
        result.scores.values(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(i)) = outcome.minority_score;
      }
    }
    generated.insert(generated.end(), x.data().begin(), x.data().end());
    generated_labels.insert(generated_labels.end(), x.batch(), cls);
    result.classes.push_back(std::move(outcome));
  }

  result.generated.num_classes = seeds.num_classes;
  result.generated.images = Tensor(generated_labels.size(), seeds.image_shape(), std::move(generated));
  result.generated.labels = std::move(generated_labels);
  return result;
}

}  // namespace fedtest::defense
