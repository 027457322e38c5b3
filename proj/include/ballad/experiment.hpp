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

// Repeated, seeded experiment runs over CSV datasets and their reports.

#ifndef BALLAD_EXPERIMENT_HPP_
#define BALLAD_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ballad/allocation.hpp"
#include "ballad/data.hpp"

namespace ballad {

// Standard Gaussian inliers plus anomalies drawn uniformly from the inlier
// bounding box scaled 5x about its center. round(n gamma) anomalies; at
// least 3 are required.
Dataset generate_synthetic(std::size_t n, std::size_t d, double gamma, std::uint64_t seed);

struct ExperimentConfig {
  std::vector<std::filesystem::path> datasets;
  std::vector<Strategy> strategies{Strategy::kBallad, Strategy::kAllInAL, Strategy::kAllInLR};
  RewardKind reward_kind = RewardKind::kEntropy;
  double budget_frac = 0.30;
  double round_frac = 0.02;
  int repetitions = 10;
  std::uint64_t seed = 0;
  double c_fp = 1.0;
  double c_fn = 1.0;
  // nullopt means c_r = gamma of each dataset.
  std::optional<double> c_r;
  CostVariant cost_variant = CostVariant::kPerExample;
  RejectRule reject_rule = RejectRule::kSquashCenter;
  EntropyForm entropy_form = EntropyForm::kSingleTerm;
  DetectorConfig detector;
  int jobs = 1;
  std::filesystem::path out_dir = "ballad-out";

  void validate() const;
};

struct RunResult {
  std::string dataset;
  Strategy strategy = Strategy::kBallad;
  RewardKind reward_kind = RewardKind::kEntropy;
  int repetition = 0;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> history;
};

struct DatasetInfo {
  std::string name;
  std::size_t n = 0;
  std::size_t d = 0;
  double gamma = 0.0;
  CostParams costs;
  int total_budget = 0;
  int per_round = 0;
};

struct ExperimentReport {
  std::vector<DatasetInfo> datasets;
  std::vector<RunResult> runs;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

// Runs every dataset x strategy x repetition. Repetition r uses seed + r for
// both the split and the run, shared across strategies. A dataset that fails
// to load or run is reported in `failures` and skipped.
ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const std::vector<std::shared_ptr<const Dataset>>& datasets);

// dataset,strategy,reward_kind,repetition followed by the history columns,
// preceded by '#' header lines describing each dataset and the config.
std::string format_rounds_csv(const ExperimentReport& report, const ExperimentConfig& config);
std::string format_run_rows(const std::string& dataset, Strategy strategy, RewardKind kind,
                            int repetition, const std::vector<RoundRecord>& history);
inline constexpr std::string_view kRoundsKeyColumns = "dataset,strategy,reward_kind,repetition";

std::vector<SummaryRow> summarize(const ExperimentReport& report, const ExperimentConfig& config);

// Writes rounds.csv and summary.csv under config.out_dir.
void write_reports(const ExperimentReport& report, const ExperimentConfig& config);

}  // namespace ballad

#endif  // BALLAD_EXPERIMENT_HPP_
