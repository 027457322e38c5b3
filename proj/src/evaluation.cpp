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

#include "ballad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "ballad/error.hpp"

namespace ballad {

std::string_view to_string(CostVariant v) {
  return v == CostVariant::kPerExample ? "per-example" : "conditional";
}

CostReport empirical_cost(std::span<const Prediction> preds, std::span<const Label> labels,
                          const CostParams& costs, CostVariant variant) {
  if (preds.size() != labels.size()) throw ContractError("predictions and labels differ in length");
  if (preds.empty()) throw ContractError("cost of an empty prediction vector");
  CostReport r;
  r.variant = variant;
  r.n = preds.size();
  std::size_t positives = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    positives += labels[i] == 1;
    switch (preds[i]) {
      case Prediction::kReject:
        ++r.rejected;
        break;
      case Prediction::kAnomaly:
        r.fp += labels[i] == 0;
        break;
      case Prediction::kNormal:
        r.fn += labels[i] == 1;
        break;
    }
  }
  const std::size_t negatives = r.n - positives;
  const auto n = static_cast<double>(r.n);
  r.reject_fraction = static_cast<double>(r.rejected) / n;
  if (variant == CostVariant::kPerExample) {
    r.cost = (costs.c_r * static_cast<double>(r.rejected) + costs.c_fp * static_cast<double>(r.fp) +
              costs.c_fn * static_cast<double>(r.fn)) /
             n;
  } else {
    if (positives == 0 || negatives == 0) {
      throw DomainError("conditional cost needs both classes in the labels");
    }
    r.cost = costs.c_r * r.reject_fraction +
             costs.c_fp * static_cast<double>(r.fp) / static_cast<double>(negatives) +
             costs.c_fn * static_cast<double>(r.fn) / static_cast<double>(positives);
  }
  return r;
}

double auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw ContractError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U from average ranks of tied groups.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw DomainError("AUC needs both classes");
  const auto p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

std::vector<SummaryRow> aggregate(std::span<const CostCurve> curves, double round_pct) {
  if (curves.empty()) throw ContractError("nothing to aggregate");
  std::map<std::tuple<std::string, std::string, int>, std::vector<double>> groups;
  for (const auto& c : curves) {
    for (std::size_t r = 0; r < c.costs.size(); ++r) {
      groups[{c.strategy, c.reward_kind, static_cast<int>(r + 1)}].push_back(c.costs[r]);
    }
  }
  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (const auto& [key, values] : groups) {
    SummaryRow row;
    std::tie(row.strategy, row.reward_kind, row.round) = key;
    row.budget_pct = round_pct * row.round;
    row.count = values.size();
    const auto m = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean_cost = sum / m;
    double ss = 0.0;
    for (double v : values) ss += (v - row.mean_cost) * (v - row.mean_cost);
    row.std_cost = std::sqrt(ss / m);
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "strategy,reward_kind,round,budget_pct,mean_cost,std_cost\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.strategy, r.reward_kind, r.round, r.budget_pct,
                       r.mean_cost, r.std_cost);
  }
  return out;
}

}  // namespace ballad
