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

// Command-line driver: run an experiment, recompute its summary, draw plots.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "fedtest/eval/config.hpp"
#include "fedtest/eval/experiment.hpp"
#include "fedtest/eval/plot.hpp"
#include "fedtest/eval/records.hpp"

namespace fs = std::filesystem;
using namespace fedtest;

namespace {

std::string pct(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * *v);
  return buf;
}

void print_summary(const eval::MetricsSummary& s) {
  std::cout << "rounds " << s.rounds << " (skipped " << s.skipped_rounds << ", errors " << s.error_rounds << ")\n"
            << "final GA " << pct(s.final_ga) << "\n"
            << "mean BA " << pct(s.mean_ba) << " (rounds >= " << s.ba_from_round << ")\n"
            << "max BA after convergence " << pct(s.max_ba_after_convergence) << " (threshold "
            << pct(s.convergence_threshold) << ", " << eval::to_string(s.threshold_source)
            << (s.converged ? "" : ", never reached") << ")\n"
            << "mean FPR " << pct(s.detection.mean_fpr) << ", mean FNR " << pct(s.detection.mean_fnr) << "\n";
}

int cmd_run(const fs::path& config_path, const fs::path& out, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> ba_from_round, bool quiet) {
  auto config = eval::load_config(config_path);
  if (seed) config.master_seed = *seed;
  if (ba_from_round) config.ba_from_round = *ba_from_round;
  eval::RunOptions options;
  options.out_dir = out;
  if (!quiet) {
    options.on_round = [&](const fl::RoundRecord& r) {
      std::cerr << "round " << r.round << " " << fl::to_string(r.status) << " GA " << pct(r.global_accuracy)
                << " BA " << pct(r.backdoor_accuracy) << " flagged " << r.flagged.size() << "/"
                << r.selected.size() << " adversaries " << r.adversaries.size() << "\n";
    };
  }
  const auto result = eval::run_experiment(config, options);
  print_summary(result.summary);
  if (!result.completed) {
    std::cerr << "run aborted: " << result.error.value_or("?") << "\n";
    return 1;
  }
  return 0;
}

int cmd_report(const fs::path& out, std::optional<std::size_t> ba_from_round) {
  auto config = eval::config_from_json(eval::read_json(out / "config.json"));
  if (ba_from_round) config.ba_from_round = *ba_from_round;
  const auto records = eval::read_records(out / "records.jsonl");
  const auto summary = eval::summarize(records, eval::threshold_spec(config), config.ba_from_round);
  std::optional<std::string> error;
  for (const auto& r : records) {
    if (r.status == fl::RoundStatus::kError) error = r.error.value_or("round error");
  }
  const bool completed = !error && records.size() == config.rounds;
  if (!completed && !error) error = "records cover " + std::to_string(records.size()) + " of " +
                                    std::to_string(config.rounds) + " rounds";
  eval::write_json(out / "summary.json", eval::summary_document(summary, completed, error));
  print_summary(summary);
  return completed ? 0 : 1;
}

int cmd_plot(const fs::path& out) {
  const auto config = eval::config_from_json(eval::read_json(out / "config.json"));
  const auto records = eval::read_records(out / "records.jsonl");
  const auto summary = eval::summarize(records, eval::threshold_spec(config), config.ba_from_round);
  const auto n = eval::write_plots(out / "plots", records, summary, config.name);
  std::cout << "wrote " << n << " plot(s) to " << (out / "plots").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning backdoor simulator with a differential-testing defense"};
  app.require_subcommand(1);

  fs::path config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ba_from_round;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--ba-from-round", ba_from_round, "first round counted in mean BA");
  run->add_flag("--quiet", quiet, "no per-round progress");

  auto* report = app.add_subcommand("report", "recompute summary.json from records.jsonl");
  report->add_option("--out", out, "run directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--ba-from-round", ba_from_round, "first round counted in mean BA");

  auto* plot = app.add_subcommand("plot", "write SVG plots under <out>/plots");
  plot->add_option("--out", out, "run directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path, out, seed, ba_from_round, quiet);
    if (*report) return cmd_report(out, ba_from_round);
    if (*plot) return cmd_plot(out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
