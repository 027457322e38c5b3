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

#ifndef BALLAD_EVALUATION_HPP_
#define BALLAD_EVALUATION_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ballad/data.hpp"
#include "ballad/rejection.hpp"

namespace ballad {

enum class CostVariant {
  // (c_r #reject + c_fp #FP + c_fn #FN) / n
  kPerExample,
  // c_r #reject/n + c_fp #FP/#negatives + c_fn #FN/#positives
  kConditional,
};

std::string_view to_string(CostVariant v);

struct CostReport {
  double cost = 0.0;
  double reject_fraction = 0.0;
  std::size_t rejected = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t n = 0;
  CostVariant variant = CostVariant::kPerExample;
};

// FP and FN are counted among non-rejected predictions only.
CostReport empirical_cost(std::span<const Prediction> preds, std::span<const Label> labels,
                          const CostParams& costs, CostVariant variant = CostVariant::kPerExample);

// Probability that a random positive outscores a random negative; ties 0.5.
double auc(std::span<const double> scores, std::span<const Label> labels);

// One run's per-round test costs, tagged for grouping.
struct CostCurve {
  std::string strategy;
  std::string reward_kind;
  std::vector<double> costs;  // index r holds round r + 1
};

struct SummaryRow {
  std::string strategy;
  std::string reward_kind;
  int round = 0;
  double budget_pct = 0.0;
  double mean_cost = 0.0;
  double std_cost = 0.0;  // population standard deviation
  std::size_t count = 0;
};

// Per (strategy, reward kind, round) mean and standard deviation. Curves of
// different lengths are aggregated over the runs that reached each round.
// `round_pct` converts a round number into the budget percentage column.
std::vector<SummaryRow> aggregate(std::span<const CostCurve> curves, double round_pct);

std::string format_summary_csv(std::span<const SummaryRow> rows);

}  // namespace ballad

#endif  // BALLAD_EVALUATION_HPP_
