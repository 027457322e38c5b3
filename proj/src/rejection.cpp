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

#include "ballad/rejection.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "ballad/detector.hpp"
#include "ballad/error.hpp"

namespace ballad {

std::string_view to_string(TauSource s) {
  switch (s) {
    case TauSource::kDefault:
      return "default";
    case TauSource::kOptimizedOnValidation:
      return "optimized-on-validation";
    case TauSource::kOptimizedOnTrain:
      return "optimized-on-train";
  }
  return "unknown";
}

double confidence(double p) { return 2.0 * std::fabs(p - 0.5); }

double reject_probability(double conf, double tau) {
  if (!(tau > 0.0)) throw DomainError("rejection threshold must be positive");
  return squash(std::max(0.0, 1.0 - conf), tau);
}

Prediction predict_trinary(double p, double tau, RejectRule rule) {
  const double conf = confidence(p);
  const bool reject = rule == RejectRule::kSquashCenter ? reject_probability(conf, tau) >= 0.5
                                                        : conf < tau;
  if (reject) return Prediction::kReject;
  return p > 0.5 ? Prediction::kAnomaly : Prediction::kNormal;
}

double rejection_rate(std::span<const double> posteriors, double tau, RejectRule rule) {
  if (posteriors.empty()) throw ContractError("rejection rate of an empty vector");
  std::size_t rejected = 0;
  for (double p : posteriors) rejected += predict_trinary(p, tau, rule) == Prediction::kReject;
  return static_cast<double>(rejected) / static_cast<double>(posteriors.size());
}

double tau_grid_value(int i) { return static_cast<double>(i) / kTauGridSize; }

double labeled_cost(const TauProblem& problem, double tau) {
  double total = 0.0;
  for (std::size_t k = 0; k < problem.labels.size(); ++k) {
    switch (predict_trinary(problem.labeled_posteriors[k], tau, problem.rule)) {
      case Prediction::kReject:
        total += problem.costs.c_r;
        break;
      case Prediction::kAnomaly:
        if (problem.labels[k] == 0) total += problem.costs.c_fp;
        break;
      case Prediction::kNormal:
        if (problem.labels[k] == 1) total += problem.costs.c_fn;
        break;
    }
  }
  return total / static_cast<double>(problem.labels.size());
}

RejectState optimize_tau(const TauProblem& problem, TauSource source, const RejectState& current) {
  if (problem.labels.size() != problem.labeled_posteriors.size()) {
    throw ContractError("labeled posteriors and labels differ in length");
  }
  if (problem.labels.empty()) {
    spdlog::warn("no labeled examples to optimize the rejection threshold; keeping tau={}",
                 current.tau);
    return current;
  }
  if (problem.pool_posteriors.empty()) throw ContractError("empty pool for the rejection cap");

  bool found = false;
  double best_cost = 0.0;
  double best_tau = 1.0;
  for (int i = 1; i <= kTauGridSize; ++i) {
    const double tau = tau_grid_value(i);
    if (rejection_rate(problem.pool_posteriors, tau, problem.rule) > problem.cap) continue;
    const double cost = labeled_cost(problem, tau);
    // Ascending scan with <= keeps the largest tau among equal costs.
    if (!found || cost <= best_cost) {
      found = true;
      best_cost = cost;
      best_tau = tau;
    }
  }
  return RejectState{found ? best_tau : 1.0, source};
}

RejectState optimize_tau(std::span<const double> pool_posteriors,
                         std::span<const std::pair<std::size_t, Label>> labeled,
                         const CostParams& costs, double cap, RejectRule rule, TauSource source,
                         const RejectState& current) {
  std::vector<double> lp;
  std::vector<Label> ly;
  lp.reserve(labeled.size());
  ly.reserve(labeled.size());
  for (const auto& [pos, y] : labeled) {
    if (pos >= pool_posteriors.size()) throw ContractError("labeled position outside the pool");
    lp.push_back(pool_posteriors[pos]);
    ly.push_back(y);
  }
  TauProblem problem{lp, ly, pool_posteriors, costs, cap, rule};
  return optimize_tau(problem, source, current);
}

}  // namespace ballad
