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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fedtest/data/dataset.hpp"
#include "fedtest/nn/classifier.hpp"
#include "fedtest/tensor.hpp"

namespace fedtest::defense {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DiffTestConfig {
  double step_size = 0.5;
  std::size_t iterations = 20;
  std::size_t pca_dims = 2;

  /// Throws std::invalid_argument unless s > 0, t >= 1 and 1 <= d <= min(K, C).
  void validate(std::size_t num_models, std::size_t num_classes) const;
};

/// K x C matrix whose row i is model i's softmax output averaged over X.
Matrix mean_softmax_predictions(std::span<const nn::Classifier* const> models, const Tensor& x);

/// Linear map fitted by PCA: project(row) = (row - mean) * components.
struct PcaMap {
  Eigen::RowVectorXd mean;  // 1 x C
  Matrix components;        // C x d, orthonormal columns
  Vector explained_variance;  // d, sample variance along each component
};

struct PcaProjection {
  Matrix points;  // K x d
  PcaMap map;
};

/// Centers the rows by their column mean and projects them onto the top-d
/// right singular vectors. Component signs are fixed so the entry of
/// largest magnitude is positive.
PcaProjection pca_project(const Matrix& preds, std::size_t d);

/// Two-means split of the rows of a K x d matrix. Indices refer to rows.
struct ClusterResult {
  std::vector<std::size_t> majority;  // G1, |G1| >= |G2|
  std::vector<std::size_t> minority;  // G2
  Vector mu1;
  Vector mu2;
  Vector majority_std;  // population standard deviation of G1 per dimension
  bool degenerate = false;
  std::size_t iterations = 0;

  double center_distance() const { return (mu1 - mu2).norm(); }
  bool is_minority(std::size_t i) const;
};

/// Lloyd's algorithm seeded with the two mutually farthest points (a seeded
/// random choice among exactly tied pairs), run to an assignment fixed point
/// or 100 iterations. When both clusters have the same size the one with
/// the smaller within-cluster sum of squares is the majority. Identical
/// points yield a degenerate result with every row in G1 and mu1 == mu2.
ClusterResult cluster_two(const Matrix& points, std::uint64_t seed);

/// ||mu1 - mu2||_2 recomputed from the models' predictions on X, holding the
/// PCA map and cluster memberships fixed.
double cluster_separation(std::span<const nn::Classifier* const> models, const Tensor& x,
                          const PcaMap& map, const ClusterResult& clusters);

/// Gradient of cluster_separation with respect to the pixels of X. The PCA
/// map and memberships are constants; gradients flow through every model's
/// softmax and the batch averaging. Zero for degenerate clusters.
Tensor separation_gradient(std::span<const nn::Classifier* const> models, const Tensor& x,
                           const PcaMap& map, const ClusterResult& clusters);

/// clamp_[0,1](X + s * gradient). Degenerate clusters return X unchanged.
Tensor differential_step(const Tensor& x, std::span<const nn::Classifier* const> models,
                         const PcaMap& map, const ClusterResult& clusters, double step_size);

/// Per-class agent scores: one row per seed class, one column per agent.
struct ScoreMatrix {
  std::vector<int> class_ids;
  std::vector<std::size_t> agent_ids;
  Matrix values;  // class_ids.size() x agent_ids.size()
};

struct ClassScores {
  double majority = 0.0;  // 2 * ||std of G1||
  double minority = 0.0;  // ||mu1 - mu2||
};

/// Scores given to G1 and G2 members; both zero for a degenerate split.
ClassScores score_clusters(const ClusterResult& clusters);

/// Diagnostics kept for one seed class.
struct ClassOutcome {
  int class_id = 0;
  ClusterResult clusters;  // clustering that produced the scores
  Matrix projected;        // K x d points of that clustering
  double majority_score = 0.0;
  double minority_score = 0.0;
};

struct DiffTestResult {
  data::LabeledDataset generated;
  ScoreMatrix scores;
  std::vector<ClassOutcome> classes;
};

/// For every class present in `seeds`: t iterations of predict -> average ->
/// PCA -> two-means -> gradient-ascent step on that class's images. The
/// clustering of the last iteration assigns the class's scores: members of
/// G1 get twice the norm of G1's standard deviation, members of G2 get the
/// distance between the cluster centers. A degenerate class scores 0 for
/// every agent. Model forward passes total C_used * t * K * |X_c|.
DiffTestResult generate_diff_inputs_and_scores(const data::LabeledDataset& seeds,
                                               std::span<const nn::Classifier* const> models,
                                               std::span<const std::size_t> agent_ids,
                                               const DiffTestConfig& config, std::uint64_t seed);

}  // namespace fedtest::defense
