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

#include "fedtest/eval/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "fedtest/data/backdoor.hpp"
#include "fedtest/data/partition.hpp"
#include "fedtest/data/synthetic.hpp"
#include "fedtest/data/validation.hpp"
#include "fedtest/eval/records.hpp"
#include "fedtest/nn/architectures.hpp"
#include "fedtest/rng.hpp"

namespace fedtest::eval {

data::DatasetBundle load_bundle(const ExperimentConfig& config) {
  if (config.dataset_dir.empty()) return data::make_synthetic_shapes(config.synthetic);
  return data::load_dataset_dir(config.dataset_dir);
}

PreparedData prepare_data(const ExperimentConfig& config, const data::DatasetBundle& bundle) {
  const auto& train = bundle.train;
  const auto& test = bundle.test;
  train.validate();
  test.validate();
  if (train.num_classes != test.num_classes || train.image_shape().str() != test.image_shape().str()) {
    throw data::DataError("train and test splits disagree on shape or class count");
  }

  PreparedData out;
  out.backdoor = config.attack.backdoor;
  const bool semantic = out.backdoor.kind == data::BackdoorKind::kSemantic;
  if (semantic && out.backdoor.semantic_sample_ids.empty()) {
    out.backdoor.semantic_sample_ids = bundle.semantic_ids;
  }
  out.backdoor.validate(train.image_shape(), config.hyper.batch_size, train.num_classes);

  std::set<std::size_t> carriers;
  if (semantic) carriers.insert(out.backdoor.semantic_sample_ids.begin(), out.backdoor.semantic_sample_ids.end());
  std::vector<std::size_t> pool;
  pool.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!carriers.contains(i)) pool.push_back(i);
  }
  const auto plan =
      data::dirichlet_partition(train, pool, config.total_agents, config.dirichlet_alpha, config.master_seed);
  const std::set<std::size_t> adversaries(config.adversary_ids.begin(), config.adversary_ids.end());
  out.agents.resize(config.total_agents);
  for (std::size_t i = 0; i < config.total_agents; ++i) {
    out.agents[i].id = i;
    out.agents[i].adversary = adversaries.contains(i);
    out.agents[i].data = train.subset(plan.agent_indices[i]);
  }

  const auto seed_idx = data::sample_validation_indices(test, config.validation_seeds,
                                                        config.validation_classes, config.master_seed);
  out.validation_seeds = test.subset(seed_idx);
  const std::set<std::size_t> seed_set(seed_idx.begin(), seed_idx.end());
  std::vector<std::size_t> clean_idx;
  std::vector<std::size_t> trigger_idx;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (seed_set.contains(i)) continue;
    clean_idx.push_back(i);
    if (test.labels[i] != out.backdoor.target_class) trigger_idx.push_back(i);
  }
  out.clean_test = test.subset(clean_idx);
  if (semantic) {
    out.backdoor_test =
        data::build_backdoor_testset(out.backdoor, train, config.master_seed, config.backdoor_test_copies);
  } else {
    out.backdoor_test = data::build_backdoor_testset(out.backdoor, test.subset(trigger_idx), config.master_seed);
  }
  return out;
}

ThresholdSpec threshold_spec(const ExperimentConfig& config) {
  ThresholdSpec t;
  t.threshold = config.convergence_threshold;
  t.baseline_final_ga = config.baseline_final_ga;
  return t;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const data::DatasetBundle& bundle,
                                const RunOptions& options) {
  config.validate();
  const auto prepared = prepare_data(config, bundle);
  const std::size_t classes = bundle.train.num_classes;
  if (config.method == fl::AggregationMethod::kDefense) {
    config.difftest.validate(config.participants(), classes);
  }
  const auto arch = nn::make_architecture(config.architecture, bundle.train.image_shape(), classes);
  auto state = fl::make_initial_state(arch->init_params(derive_seed(config.master_seed, Stream::kModelInit, {})),
                                      config.total_agents, config.participation, config.eta);

  fl::RoundContext ctx;
  ctx.architecture = arch;
  ctx.agents = prepared.agents;
  ctx.hyper = config.hyper;
  ctx.attack = config.attack;
  ctx.attack.backdoor = prepared.backdoor;
  ctx.semantic_source = &bundle.train;
  ctx.method = config.method;
  ctx.defense.difftest = config.difftest;
  ctx.defense.variant = config.detector;
  ctx.defense.cutoff = config.cutoff;
  ctx.defense.validation_seeds = prepared.validation_seeds;
  ctx.defense.keep_generated = config.export_diff_images && options.out_dir.has_value();
  ctx.krum_norm_order = config.krum_norm_order;
  ctx.krum_selected = config.krum_selected;
  ctx.clean_test = &prepared.clean_test;
  ctx.backdoor_test = &prepared.backdoor_test;
  ctx.master_seed = config.master_seed;

  std::ofstream records_out;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    write_json(*options.out_dir / "config.json", to_json(config));
    records_out.open(*options.out_dir / "records.jsonl", std::ios::trunc);
    if (!records_out) throw data::DataError("cannot write records in " + options.out_dir->string());
    if (ctx.defense.keep_generated) std::filesystem::create_directories(*options.out_dir / "diff_images");
  }

  ExperimentResult result;
  for (std::size_t t = 0; t < config.rounds; ++t) {
    auto outcome = fl::run_round(state, ctx);
    state = std::move(outcome.state);
    auto& rec = outcome.record;
    if (rec.generated && options.out_dir) {
      char name[32];
      std::snprintf(name, sizeof(name), "round_%04zu.bin", rec.round);
      data::write_dataset(*options.out_dir / "diff_images" / name, *rec.generated);
    }
    rec.generated.reset();
    if (records_out.is_open()) append_record(records_out, rec);
    if (options.on_round) options.on_round(rec);
    const bool failed = rec.status == fl::RoundStatus::kError;
    if (failed) result.error = "round " + std::to_string(rec.round) + ": " + rec.error.value_or("?");
    result.records.push_back(std::move(rec));
    if (failed) break;
  }
  result.completed = !result.error.has_value();
  result.final_params = state.params;
  result.summary = summarize(result.records, threshold_spec(config), config.ba_from_round);
  if (options.out_dir) {
    write_json(*options.out_dir / "summary.json",
               summary_document(result.summary, result.completed, result.error));
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  return run_experiment(config, load_bundle(config), options);
}

}  // namespace fedtest::eval
