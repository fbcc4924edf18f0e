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

#include <algorithm>
#include <random>
#include <set>

#include "fedtest/data/synthetic.hpp"
#include "fedtest/fl/core.hpp"
#include "fedtest/nn/architectures.hpp"

using namespace fedtest;
using namespace fedtest::fl;

namespace {

GlobalState state_with(std::size_t n, double beta, std::vector<double> g = {0.0}) {
  return make_initial_state(ParamVector("s", std::move(g)), n, beta);
}

}  // namespace

TEST(Participants, RoundsHalfUp) {
  EXPECT_EQ(participant_count(50, 0.2), 10u);
  EXPECT_EQ(participant_count(20, 0.25), 5u);
  EXPECT_EQ(participant_count(10, 0.25), 3u);  // 2.5 rounds up
  EXPECT_EQ(participant_count(5, 1.0), 5u);
  EXPECT_THROW(state_with(10, 0.01), std::invalid_argument);  // K = 0
  EXPECT_THROW(state_with(10, 1.5), std::invalid_argument);
}

TEST(Select, DrawsKDistinctIdsDeterministically) {
  auto s = state_with(50, 0.2);
  const auto a = select_agents(s, 7);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 10u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(a, select_agents(s, 7));
  s.round = 1;
  EXPECT_NE(a, select_agents(s, 7));

  const auto all = select_agents(state_with(5, 1.0), 3);
  EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Select, IsRoughlyUniform) {
  auto s = state_with(20, 0.25);
  std::vector<int> hits(20, 0);
  for (std::size_t t = 0; t < 4000; ++t) {
    s.round = t;
    for (std::size_t id : select_agents(s, 1)) ++hits[id];
  }
  for (int h : hits) EXPECT_NEAR(h, 1000, 120);
}

TEST(FedAvg, MatchesTheLiteralFormula) {
  const auto s = state_with(10, 0.2);  // eta = 5
  const auto g = fedavg_aggregate(s, std::vector<ParamVector>{ParamVector("s", {1.0}), ParamVector("s", {3.0})});
  EXPECT_DOUBLE_EQ(g[0], 2.0);
  const auto zero = fedavg_aggregate(s, std::vector<ParamVector>(2, ParamVector("s", {0.0})));
  EXPECT_EQ(zero, s.params);

  auto unit = make_initial_state(ParamVector("s", {1.0}), 4, 1.0, 4.0);  // eta / N = 1
  EXPECT_DOUBLE_EQ(fedavg_aggregate(unit, std::vector<ParamVector>{ParamVector("s", {2.5})})[0], 3.5);
}

TEST(FedAvg, ErrorsOnBadInput) {
  const auto s = state_with(10, 0.2);
  EXPECT_THROW(fedavg_aggregate(s, std::vector<ParamVector>{}), std::invalid_argument);
  EXPECT_THROW(fedavg_aggregate(s, std::vector<ParamVector>{ParamVector("t", {1.0})}), LayoutMismatch);
}

TEST(FedAvg, DefaultEtaGivesTheParticipantMean) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 3.0);
  const auto s = state_with(40, 0.25, {0.5, -1.0, 2.0});
  std::vector<ParamVector> u;
  for (int i = 0; i < 10; ++i) u.emplace_back("s", std::vector<double>{n(rng), n(rng), n(rng)});
  const auto g = fedavg_aggregate(s, u);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (const auto& v : u) mean += v[j];
    mean /= 10.0;
    EXPECT_NEAR(g[j] - s.params[j], mean, 1e-9);
  }
}

TEST(Filtered, AveragesTheInliers) {
  const auto s = state_with(30, 0.1);  // K = 3, eta = 10
  const std::map<std::size_t, ParamVector> u{
      {1, ParamVector("s", {2.0})}, {2, ParamVector("s", {4.0})}, {3, ParamVector("s", {100.0})}};
  EXPECT_DOUBLE_EQ(filtered_aggregate(s, u, {3})[0], 3.0);
  std::vector<ParamVector> plain;
  for (const auto& [id, v] : u) plain.push_back(v);
  EXPECT_EQ(filtered_aggregate(s, u, {}), fedavg_aggregate(s, plain));
  EXPECT_THROW(filtered_aggregate(s, u, {1, 2, 3}), NoInliers);
  EXPECT_THROW(filtered_aggregate(s, u, {9}), std::invalid_argument);
}

TEST(Names, RoundTrip) {
  for (auto m : {AggregationMethod::kFedAvg, AggregationMethod::kMultiKrum, AggregationMethod::kCoomed,
                 AggregationMethod::kDefense}) {
    EXPECT_EQ(aggregation_method_from_string(to_string(m)), m);
  }
  for (auto s : {RoundStatus::kOk, RoundStatus::kSkipped, RoundStatus::kError}) {
    EXPECT_EQ(round_status_from_string(to_string(s)), s);
  }
}

class RunRound : public ::testing::Test {
 protected:
  void SetUp() override {
    data::SyntheticOptions opt;
    opt.train_size = 600;
    opt.test_size = 200;
    opt.semantic_carriers = 0;
    bundle_ = data::make_synthetic_shapes(opt);
    arch_ = nn::make_small_cnn(Shape{1, 28, 28}, 10);
    agents_.resize(6);
    for (std::size_t i = 0; i < 6; ++i) {
      std::vector<std::size_t> idx;
      for (std::size_t j = i; j < 600; j += 6) idx.push_back(j);
      agents_[i].id = i;
      agents_[i].adversary = i == 0;
      agents_[i].data = bundle_.train.subset(idx);
    }
    seeds_ = bundle_.test.subset(std::vector<std::size_t>{0, 1, 2, 3});
  }

  RoundContext context(AggregationMethod method) const {
    RoundContext ctx;
    ctx.architecture = arch_;
    ctx.agents = agents_;
    ctx.hyper.local_epochs = 1;
    ctx.method = method;
    ctx.defense.validation_seeds = seeds_;
    ctx.defense.difftest.iterations = 2;
    ctx.clean_test = &bundle_.test;
    ctx.backdoor_test = &bundle_.test;
    ctx.master_seed = 5;
    return ctx;
  }

  GlobalState initial() const { return make_initial_state(arch_->init_params(1), 6, 0.5); }

  data::DatasetBundle bundle_;
  std::shared_ptr<const nn::Architecture> arch_;
  std::vector<Agent> agents_;
  data::LabeledDataset seeds_;
};

TEST_F(RunRound, FedAvgNeverFlags) {
  const auto out = run_round(initial(), context(AggregationMethod::kFedAvg));
  EXPECT_EQ(out.record.status, RoundStatus::kOk);
  EXPECT_TRUE(out.record.flagged.empty());
  EXPECT_EQ(out.record.selected.size(), 3u);
  EXPECT_EQ(out.state.round, 1u);
  ASSERT_TRUE(out.record.global_accuracy.has_value());
  EXPECT_GE(*out.record.global_accuracy, 0.0);
  EXPECT_LE(*out.record.global_accuracy, 1.0);
  EXPECT_NE(out.state.params, initial().params);
}

TEST_F(RunRound, IsBitIdenticalAcrossRuns) {
  for (auto m : {AggregationMethod::kDefense, AggregationMethod::kCoomed}) {
    const auto a = run_round(initial(), context(m));
    const auto b = run_round(initial(), context(m));
    EXPECT_EQ(a.state.params, b.state.params);
    EXPECT_EQ(a.record.flagged, b.record.flagged);
    EXPECT_EQ(a.record.global_accuracy, b.record.global_accuracy);
  }
}

TEST_F(RunRound, DefenseRecordsDiagnostics) {
  auto s = initial();
  for (std::size_t t = 0; t < 6; ++t) {
    s.round = t;
    const auto out = run_round(s, context(AggregationMethod::kDefense));
    ASSERT_NE(out.record.status, RoundStatus::kError) << out.record.error.value_or("");
    ASSERT_TRUE(out.record.detection.has_value());
    EXPECT_EQ(out.record.classes.size(), 4u);
    for (std::size_t id : out.record.flagged) {
      EXPECT_TRUE(std::find(out.record.selected.begin(), out.record.selected.end(), id) != out.record.selected.end());
    }
    for (const auto& c : out.record.classes) EXPECT_EQ(c.points.size(), 3u);
  }
}

TEST_F(RunRound, ErrorsLeaveTheModelUnchanged) {
  auto ctx = context(AggregationMethod::kMultiKrum);  // K = 3 < 2b + 3 whenever b >= 1
  auto s = initial();
  bool saw_error = false;
  for (std::size_t t = 0; t < 8 && !saw_error; ++t) {
    s.round = t;
    const auto out = run_round(s, ctx);
    if (out.record.status == RoundStatus::kError) {
      saw_error = true;
      EXPECT_EQ(out.state.params, s.params);
      EXPECT_TRUE(out.record.error.has_value());
      EXPECT_FALSE(out.record.global_accuracy.has_value());
      EXPECT_EQ(out.state.round, t + 1);
    }
  }
  EXPECT_TRUE(saw_error);
}
