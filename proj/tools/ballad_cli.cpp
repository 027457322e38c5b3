/*
 * Copyright 2026 The Ballad Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// ballad run | synth | serve

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "ballad/allocation.hpp"
#include "ballad/error.hpp"
#include "ballad/experiment.hpp"
#include "ballad/session.hpp"

namespace {

// CLI11 only reads config files attached to the top-level app, so flat keys
// are filed under the run subcommand. Explicit [section] headers still work.
struct RunSectionConfig : CLI::ConfigINI {
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items) {
      if (item.parents.empty() && item.name != "++" && item.name != "--") item.parents = {"run"};
    }
    return items;
  }
};

std::vector<ballad::Strategy> parse_strategies(const std::string& s) {
  if (s == "all") {
    return {ballad::Strategy::kBallad, ballad::Strategy::kAllInAL, ballad::Strategy::kAllInLR};
  }
  return {ballad::parse_strategy(s)};
}

void print_final_costs(const ballad::ExperimentReport& report) {
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> finals;
  for (const auto& run : report.runs) {
    if (run.history.empty()) continue;
    auto& [sum, count] = finals[{run.dataset, std::string(ballad::to_string(run.strategy))}];
    sum += run.history.back().test_cost;
    ++count;
  }
  for (const auto& [key, acc] : finals) {
    fmt::print("{:<24} {:<10} final mean cost {:.4f} over {} runs\n", key.first, key.second,
               acc.first / acc.second, acc.second);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label budget allocation between active learning and learning to reject"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<RunSectionConfig>());
  app.set_config("--config", "", "Key-value file of run options; flags override it");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run seeded experiments over CSV datasets");
  std::vector<std::string> data;
  std::string strategy = "all";
  std::string reward = "entropy";
  std::string cr = "auto";
  std::string cost_variant = "per-example";
  std::string reject_rule = "squash-center";
  std::string entropy_form = "single-term";
  ballad::ExperimentConfig cfg;
  std::string out_dir = "ballad-out";
  run_cmd->add_option("--data", data, "Dataset CSV path(s)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--strategy", strategy, "ballad|all-in-al|all-in-lr|all")
      ->check(CLI::IsMember({"ballad", "all-in-al", "all-in-lr", "all"}));
  run_cmd->add_option("--reward", reward, "entropy|cosine")->check(CLI::IsMember({"entropy", "cosine"}));
  run_cmd->add_option("--budget-frac", cfg.budget_frac, "Total budget as a fraction of |train|")
      ->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--round-frac", cfg.round_frac, "Per-round batch as a fraction of |train|")
      ->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--reps", cfg.repetitions, "Repetitions per dataset and strategy")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", cfg.seed, "Base seed; repetition r uses seed + r");
  run_cmd->add_option("--cfp", cfg.c_fp, "False-positive cost")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--cfn", cfg.c_fn, "False-negative cost")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--cr", cr, "Rejection cost, or 'auto' for the contamination factor");
  run_cmd->add_option("--cost-variant", cost_variant, "per-example|conditional")
      ->check(CLI::IsMember({"per-example", "conditional"}));
  run_cmd->add_option("--reject-rule", reject_rule, "squash-center|confidence-below-tau")
      ->check(CLI::IsMember({"squash-center", "confidence-below-tau"}));
  run_cmd->add_option("--entropy-form", entropy_form, "single-term|binary")
      ->check(CLI::IsMember({"single-term", "binary"}));
  run_cmd->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out_dir, "Output directory for rounds.csv and summary.csv");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a Gaussian-plus-uniform synthetic dataset");
  std::size_t n = 1000;
  std::size_t d = 4;
  double gamma = 0.05;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth_cmd->add_option("--n", n, "Rows")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--d", d, "Features")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--gamma", gamma, "Anomaly fraction")->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--seed", synth_seed, "Seed");
  synth_cmd->add_option("--out", synth_out, "Output CSV path")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve interactive allocation sessions over HTTP");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      cfg.datasets.assign(data.begin(), data.end());
      cfg.strategies = parse_strategies(strategy);
      cfg.reward_kind = ballad::parse_reward_kind(reward);
      cfg.cost_variant = ballad::parse_cost_variant(cost_variant);
      cfg.reject_rule = reject_rule == "squash-center" ? ballad::RejectRule::kSquashCenter
                                                       : ballad::RejectRule::kConfidenceBelowTau;
      cfg.entropy_form = entropy_form == "binary" ? ballad::EntropyForm::kBinary
                                                  : ballad::EntropyForm::kSingleTerm;
      if (cr != "auto") cfg.c_r = std::stod(cr);
      cfg.out_dir = out_dir;
      const auto report = ballad::run_experiment(cfg);
      ballad::write_reports(report, cfg);
      print_final_costs(report);
      for (const auto& f : report.failures) fmt::print(stderr, "failed: {}\n", f);
      fmt::print("wrote {} and {}\n", (cfg.out_dir / "rounds.csv").string(),
                 (cfg.out_dir / "summary.csv").string());
      return report.ok() ? 0 : 1;
    }
    if (*synth_cmd) {
      auto ds = ballad::generate_synthetic(n, d, gamma, synth_seed);
      ballad::write_dataset(ds, synth_out);
      fmt::print("wrote {} rows ({} anomalies) to {}\n", ds.size(), ds.anomaly_count(), synth_out);
      return 0;
    }
    if (*serve_cmd) {
      ballad::serve(host, port);
      return 0;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
