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

#include "fedtest/fl/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedtest/eval/metrics.hpp"
#include "fedtest/rng.hpp"

namespace fedtest::fl {

std::size_t participant_count(std::size_t total_agents, double participation) {
  return static_cast<std::size_t>(std::floor(participation * static_cast<double>(total_agents) + 0.5));
}

void GlobalState::validate() const {
  if (total_agents < 1) throw std::invalid_argument("need at least one agent");
  if (!(participation > 0.0 && participation <= 1.0)) {
    throw std::invalid_argument("participation ratio must lie in (0, 1]");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("global learning rate must be positive");
  const std::size_t k = participants();
  if (k < 1 || k > total_agents) {
    throw std::invalid_argument("participant count " + std::to_string(k) + " outside [1, " +
                                std::to_string(total_agents) + "]");
  }
}

GlobalState make_initial_state(ParamVector params, std::size_t total_agents, double participation,
                               std::optional<double> eta) {
  GlobalState s;
  s.params = std::move(params);
  s.total_agents = total_agents;
  s.participation = participation;
  s.eta = eta.value_or(1.0 / participation);
  s.validate();
  return s;
}

std::string to_string(AggregationMethod method) {
  switch (method) {
    case AggregationMethod::kFedAvg: return "fedavg";
    case AggregationMethod::kMultiKrum: return "multikrum";
    case AggregationMethod::kCoomed: return "coomed";
    case AggregationMethod::kDefense: return "defense";
  }
  return "?";
}

AggregationMethod aggregation_method_from_string(const std::string& s) {
  if (s == "fedavg") return AggregationMethod::kFedAvg;
  if (s == "multikrum") return AggregationMethod::kMultiKrum;
  if (s == "coomed") return AggregationMethod::kCoomed;
  if (s == "defense") return AggregationMethod::kDefense;
  throw std::invalid_argument("unknown aggregation method '" + s + "'");
}

std::string to_string(RoundStatus status) {
  switch (status) {
    case RoundStatus::kOk: return "ok";
    case RoundStatus::kSkipped: return "skipped";
    case RoundStatus::kError: return "error";
  }
  return "?";
}

RoundStatus round_status_from_string(const std::string& s) {
  if (s == "ok") return RoundStatus::kOk;
  if (s == "skipped") return RoundStatus::kSkipped;
  if (s == "error") return RoundStatus::kError;
  throw std::invalid_argument("unknown round status '" + s + "'");
}

std::vector<std::size_t> select_agents(const GlobalState& state, std::uint64_t seed) {
  state.validate();
  const std::size_t n = state.total_agents;
  const std::size_t k = state.participants();
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  auto rng = make_rng(seed, Stream::kSelection, {state.round});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

ParamVector fedavg_aggregate(const GlobalState& state, std::span<const ParamVector> updates) {
  if (updates.empty()) throw std::invalid_argument("fedavg over zero updates");
  ParamVector sum(state.params.layout_id(), state.params.size());
  for (const auto& u : updates) sum += u;  // throws LayoutMismatch
  ParamVector out = state.params;
  out.add_scaled(sum, state.eta / static_cast<double>(state.total_agents));
  return out;
}

ParamVector filtered_aggregate(const GlobalState& state, const std::map<std::size_t, ParamVector>& updates,
                               const std::set<std::size_t>& outliers) {
  if (updates.empty()) throw std::invalid_argument("filtered aggregation over zero updates");
  for (std::size_t id : outliers) {
    if (!updates.contains(id)) {
      throw std::invalid_argument("flagged agent " + std::to_string(id) + " submitted no update");
    }
  }
  ParamVector sum(state.params.layout_id(), state.params.size());
  std::size_t inliers = 0;
  for (const auto& [id, u] : updates) {
    if (outliers.contains(id)) continue;
    sum += u;
    ++inliers;
  }
  if (inliers == 0) throw NoInliers();
  const double factor = state.eta / static_cast<double>(state.total_agents) *
                        (static_cast<double>(updates.size()) / static_cast<double>(inliers));
  ParamVector out = state.params;
  out.add_scaled(sum, factor);
  return out;
}

namespace {

void evaluate(const RoundContext& ctx, const ParamVector& params, RoundRecord& rec) {
  const nn::Classifier model(ctx.architecture, params);
  if (ctx.clean_test != nullptr && !ctx.clean_test->empty()) {
    rec.global_accuracy = eval::compute_global_accuracy(model, *ctx.clean_test);
  }
  if (ctx.backdoor_test != nullptr && !ctx.backdoor_test->empty()) {
    rec.backdoor_accuracy = eval::compute_backdoor_accuracy(model, *ctx.backdoor_test);
  }
}

ParamVector run_defense(const GlobalState& state, const RoundContext& ctx,
                        const std::vector<ParamVector>& updates, RoundRecord& rec) {
  std::vector<nn::Classifier> models;
  models.reserve(updates.size());
  for (const auto& u : updates) models.emplace_back(ctx.architecture, state.params + u);
  std::vector<const nn::Classifier*> model_ptrs;
  for (const auto& m : models) model_ptrs.push_back(&m);

  const auto seed = derive_seed(ctx.master_seed, Stream::kDefense, {state.round});
  auto diff = defense::generate_diff_inputs_and_scores(ctx.defense.validation_seeds, model_ptrs,
                                                       rec.selected, ctx.defense.difftest, seed);
  auto report = defense::detect_outliers(diff.scores, ctx.defense.variant, ctx.defense.cutoff);
  rec.flagged = report.outlier_ids();

  for (const auto& cls : diff.classes) {
    ClassDiagnostics d;
    d.class_id = cls.class_id;
    d.degenerate = cls.clusters.degenerate;
    for (std::size_t i : cls.clusters.minority) d.minority_ids.push_back(rec.selected[i]);
    std::sort(d.minority_ids.begin(), d.minority_ids.end());
    for (Eigen::Index r = 0; r < cls.projected.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(cls.projected.cols()));
      for (Eigen::Index c = 0; c < cls.projected.cols(); ++c) row[static_cast<std::size_t>(c)] = cls.projected(r, c);
      d.points.push_back(std::move(row));
    }
    rec.classes.push_back(std::move(d));
  }
  rec.detection = std::move(report);
  if (ctx.defense.keep_generated) rec.generated = std::move(diff.generated);

  std::map<std::size_t, ParamVector> keyed;
  for (std::size_t i = 0; i < updates.size(); ++i) keyed.emplace(rec.selected[i], updates[i]);
  const std::set<std::size_t> outliers(rec.flagged.begin(), rec.flagged.end());
  return filtered_aggregate(state, keyed, outliers);
}

}  // namespace

RoundOutcome run_round(const GlobalState& state, const RoundContext& ctx) {
  RoundOutcome out{state, {}};
  RoundRecord& rec = out.record;
  rec.round = state.round;
  rec.method = ctx.method;
  out.state.round = state.round + 1;

  try {
    if (!ctx.architecture) throw std::invalid_argument("round context has no architecture");
    if (ctx.agents.size() != state.total_agents) {
      throw std::invalid_argument("agent roster size differs from N");
    }
    rec.selected = select_agents(state, ctx.master_seed);
    for (std::size_t id : rec.selected) {
      if (ctx.agents[id].adversary) rec.adversaries.push_back(id);
    }

    const nn::Classifier global(ctx.architecture, state.params);
    const double gamma = ctx.attack.scaling_gamma > 0.0
                             ? ctx.attack.scaling_gamma
                             : static_cast<double>(state.total_agents) / state.eta;
    std::vector<ParamVector> updates;
    updates.reserve(rec.selected.size());
    for (std::size_t id : rec.selected) {
      const Agent& agent = ctx.agents[id];
      const auto seed = derive_seed(ctx.master_seed, Stream::kLocalTraining, {id, state.round});
      train::TrainReport report;
      if (agent.adversary) {
        report = train::train_adversarial(global, agent.data, ctx.attack, state.params, ctx.hyper, seed,
                                          ctx.semantic_source);
        report.update = train::scale_update(report.update, gamma, rec.adversaries.size());
      } else {
        report = train::train_benign(global, agent.data, ctx.hyper, seed);
      }
      if (report.warning) rec.warnings.push_back("agent " + std::to_string(id) + ": " + *report.warning);
      updates.push_back(std::move(report.update));
    }

    ParamVector next;
    switch (ctx.method) {
      case AggregationMethod::kFedAvg:
        next = fedavg_aggregate(state, updates);
        break;
      case AggregationMethod::kMultiKrum: {
        agg::KrumConfig krum;
        krum.assumed_adversaries = rec.adversaries.size();
        krum.selected_count = ctx.krum_selected;
        krum.norm_order = ctx.krum_norm_order;
        next = agg::multi_krum_aggregate(state.params, updates, krum);
        break;
      }
      case AggregationMethod::kCoomed:
        next = agg::coomed_aggregate(state.params, updates);
        break;
      case AggregationMethod::kDefense:
        try {
          next = run_defense(state, ctx, updates, rec);
        } catch (const NoInliers& e) {
          rec.status = RoundStatus::kSkipped;
          rec.warnings.emplace_back(e.what());
          next = state.params;
        }
        break;
    }
    evaluate(ctx, next, rec);
    out.state.params = std::move(next);
  } catch (const std::exception& e) {
    rec.status = RoundStatus::kError;
    rec.error = e.what();
    rec.global_accuracy.reset();
    rec.backdoor_accuracy.reset();
    out.state.params = state.params;
  }
  return out;
}

}  // namespace fedtest::fl
