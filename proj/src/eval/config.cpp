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

#include "fedtest/eval/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace fedtest::eval {
namespace {

using nlohmann::json;

/// Reads optional keys of one JSON object and rejects any it was not asked
/// about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument("config: '" + path_ + "' must be an object");
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    try {
      target = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument("config: bad value for '" + where(key) + "': " + e.what());
    }
  }

  template <typename T>
  void read_optional(const std::string& key, std::optional<T>& target) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T value{};
    read(key, value);
    target = value;
  }

  std::optional<Section> child(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    return Section(j_.at(key), where(key));
  }

  std::optional<std::string> text(const std::string& key) {
    std::optional<std::string> s;
    read_optional(key, s);
    return s;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw std::invalid_argument("config: unknown key '" + where(key) + "'");
    }
  }

 private:
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (total_agents < 1) fail("agents.total must be >= 1");
  if (!(participation > 0.0 && participation <= 1.0)) fail("agents.participation must lie in (0, 1]");
  const std::size_t k = participants();
  if (k < 1 || k > total_agents) fail("participation yields K outside [1, N]");
  if (eta && !(*eta > 0.0)) fail("agents.eta must be positive");
  if (rounds < 1) fail("rounds must be >= 1");
  if (!(dirichlet_alpha > 0.0)) fail("agents.dirichlet_alpha must be positive");
  std::set<std::size_t> adv(adversary_ids.begin(), adversary_ids.end());
  if (adv.size() != adversary_ids.size()) fail("agents.adversaries has duplicates");
  if (!adv.empty() && *adv.rbegin() >= total_agents) fail("agents.adversaries contains an id >= N");
  if (adv.size() >= total_agents) fail("at least one agent must be benign");

  hyper.validate();
  if (!(attack.alpha >= 0.0 && attack.alpha <= 1.0)) fail("attack.alpha must lie in [0, 1]");
  if (attack.scaling_gamma < 0.0) fail("attack.scaling_gamma must be >= 0 (0 means N / eta)");
  if (attack.backdoor.poison_per_batch > hyper.batch_size) fail("attack.backdoor.poison_per_batch exceeds batch size");
  if (attack.backdoor.noise_sigma < 0.0) fail("attack.backdoor.noise_sigma must be >= 0");
  if (attack.backdoor.target_class < 0) fail("attack.backdoor.target_class must be >= 0");

  if (method == fl::AggregationMethod::kMultiKrum) {
    const std::size_t worst_b = std::min(adv.size(), k);
    if (k < 2 * worst_b + 3) fail("multikrum needs K >= 2b + 3 for every possible b");
    if (krum_selected > k) fail("aggregation.krum.selected_count exceeds K");
    if (!(krum_norm_order >= 1.0)) fail("aggregation.krum.norm_order must be >= 1");
  }
  if (method == fl::AggregationMethod::kDefense) {
    if (k < 2) fail("the defense needs K >= 2");
    difftest.validate(k, std::max<std::size_t>(validation_classes, difftest.pca_dims));
    if (!(cutoff > 0.0)) fail("defense.cutoff must be positive");
    if (validation_seeds < 1 || validation_classes < 1) fail("defense needs validation seeds");
  }
  if (convergence_threshold && !(*convergence_threshold >= 0.0 && *convergence_threshold <= 1.0)) {
    fail("metrics.convergence_threshold must lie in [0, 1]");
  }
  if (baseline_final_ga && !(*baseline_final_ga >= 0.0 && *baseline_final_ga <= 1.0)) {
    fail("metrics.baseline_final_ga must lie in [0, 1]");
  }
  if (backdoor_test_copies < 1) fail("metrics.backdoor_test_copies must be >= 1");
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Section root(j, "");
  root.read("name", c.name);
  root.read("architecture", c.architecture);
  root.read("rounds", c.rounds);
  root.read("seed", c.master_seed);

  if (auto ds = root.child("dataset")) {
    if (auto dir = ds->text("dir")) c.dataset_dir = *dir;
    if (auto syn = ds->child("synthetic")) {
      syn->read("train_size", c.synthetic.train_size);
      syn->read("test_size", c.synthetic.test_size);
      syn->read("semantic_carriers", c.synthetic.semantic_carriers);
      syn->read("semantic_source_class", c.synthetic.semantic_source_class);
      syn->read("pixel_noise", c.synthetic.pixel_noise);
      syn->read("seed", c.synthetic.seed);
      syn->finish();
    }
    ds->finish();
  }
  if (auto ag = root.child("agents")) {
    ag->read("total", c.total_agents);
    ag->read("participation", c.participation);
    ag->read_optional("eta", c.eta);
    ag->read("adversaries", c.adversary_ids);
    ag->read("dirichlet_alpha", c.dirichlet_alpha);
    ag->finish();
  }
  if (auto tr = root.child("training")) {
    tr->read("local_epochs", c.hyper.local_epochs);
    tr->read("learning_rate", c.hyper.learning_rate);
    tr->read("momentum", c.hyper.momentum);
    tr->read("weight_decay", c.hyper.weight_decay);
    tr->read("batch_size", c.hyper.batch_size);
    tr->finish();
  }
  if (auto at = root.child("attack")) {
    at->read("alpha", c.attack.alpha);
    at->read("scaling_gamma", c.attack.scaling_gamma);
    if (auto a = at->text("anchor")) c.attack.anchor = train::anchor_metric_from_string(*a);
    if (auto bd = at->child("backdoor")) {
      auto& b = c.attack.backdoor;
      if (auto kind = bd->text("kind")) b.kind = data::backdoor_kind_from_string(*kind);
      bd->read("target_class", b.target_class);
      bd->read("trigger_size", b.trigger_size);
      bd->read("poison_per_batch", b.poison_per_batch);
      bd->read("noise_sigma", b.noise_sigma);
      bd->read("semantic_split", b.semantic_split);
      bd->finish();
    }
    at->finish();
  }
  if (auto ag = root.child("aggregation")) {
    if (auto m = ag->text("method")) c.method = fl::aggregation_method_from_string(*m);
    if (auto kr = ag->child("krum")) {
      kr->read("norm_order", c.krum_norm_order);
      kr->read("selected_count", c.krum_selected);
      kr->finish();
    }
    ag->finish();
  }
  if (auto df = root.child("defense")) {
    df->read("step_size", c.difftest.step_size);
    df->read("iterations", c.difftest.iterations);
    df->read("pca_dims", c.difftest.pca_dims);
    if (auto v = df->text("variant")) c.detector = defense::mad_variant_from_string(*v);
    df->read("cutoff", c.cutoff);
    df->read("validation_seeds", c.validation_seeds);
    df->read("validation_classes", c.validation_classes);
    df->read("export_images", c.export_diff_images);
    df->finish();
  }
  if (auto mt = root.child("metrics")) {
    mt->read_optional("convergence_threshold", c.convergence_threshold);
    mt->read_optional("baseline_final_ga", c.baseline_final_ga);
    mt->read("ba_from_round", c.ba_from_round);
    mt->read("backdoor_test_copies", c.backdoor_test_copies);
    mt->finish();
  }
  root.finish();
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json dataset;
  if (!c.dataset_dir.empty()) dataset["dir"] = c.dataset_dir.string();
  dataset["synthetic"] = {{"train_size", c.synthetic.train_size},
                          {"test_size", c.synthetic.test_size},
                          {"semantic_carriers", c.synthetic.semantic_carriers},
                          {"semantic_source_class", c.synthetic.semantic_source_class},
                          {"pixel_noise", c.synthetic.pixel_noise},
                          {"seed", c.synthetic.seed}};
  const auto& b = c.attack.backdoor;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{
      {"name", c.name},
      {"architecture", c.architecture},
      {"rounds", c.rounds},
      {"seed", c.master_seed},
      {"dataset", dataset},
      {"agents",
       {{"total", c.total_agents},
        {"participation", c.participation},
        {"eta", opt(c.eta)},
        {"adversaries", c.adversary_ids},
        {"dirichlet_alpha", c.dirichlet_alpha}}},
      {"training",
       {{"local_epochs", c.hyper.local_epochs},
        {"learning_rate", c.hyper.learning_rate},
        {"momentum", c.hyper.momentum},
        {"weight_decay", c.hyper.weight_decay},
        {"batch_size", c.hyper.batch_size}}},
      {"attack",
       {{"alpha", c.attack.alpha},
        {"scaling_gamma", c.attack.scaling_gamma},
        {"anchor", train::to_string(c.attack.anchor)},
        {"backdoor",
         {{"kind", data::to_string(b.kind)},
          {"target_class", b.target_class},
          {"trigger_size", b.trigger_size},
          {"poison_per_batch", b.poison_per_batch},
          {"noise_sigma", b.noise_sigma},
          {"semantic_split", b.semantic_split}}}}},
      {"aggregation",
       {{"method", fl::to_string(c.method)},
        {"krum", {{"norm_order", c.krum_norm_order}, {"selected_count", c.krum_selected}}}}},
      {"defense",
       {{"step_size", c.difftest.step_size},
        {"iterations", c.difftest.iterations},
        {"pca_dims", c.difftest.pca_dims},
        {"variant", defense::to_string(c.detector)},
        {"cutoff", c.cutoff},
        {"validation_seeds", c.validation_seeds},
        {"validation_classes", c.validation_classes},
        {"export_images", c.export_diff_images}}},
      {"metrics",
       {{"convergence_threshold", opt(c.convergence_threshold)},
        {"baseline_final_ga", opt(c.baseline_final_ga)},
        {"ba_from_round", c.ba_from_round},
        {"backdoor_test_copies", c.backdoor_test_copies}}},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);  // comments allowed
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path.string() + ": " + e.what());
  }
  auto c = config_from_json(j);
  if (!c.dataset_dir.empty() && c.dataset_dir.is_relative()) {
    c.dataset_dir = path.parent_path() / c.dataset_dir;
  }
  return c;
}

}  // namespace fedtest::eval
