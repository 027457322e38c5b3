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

// Dependent reject option: confidence from the detector posterior, a
// rejection threshold tau, and cost-driven selection of tau.

#ifndef BALLAD_REJECTION_HPP_
#define BALLAD_REJECTION_HPP_

#include <span>
#include <string_view>
#include <vector>

#include "ballad/data.hpp"

namespace ballad {

enum class Prediction { kNormal, kAnomaly, kReject };

enum class RejectRule {
  // Reject iff squash(1 - C, tau) >= 0.5, i.e. C <= 1 - tau.
  kSquashCenter,
  // Reject iff C < tau.
  kConfidenceBelowTau,
};

enum class TauSource { kDefault, kOptimizedOnValidation, kOptimizedOnTrain };

std::string_view to_string(TauSource s);

inline constexpr double kDefaultTau = 0.1;
inline constexpr double kDefaultRejectionCap = 0.5;
inline constexpr int kTauGridSize = 200;

struct RejectState {
  double tau = kDefaultTau;
  TauSource source = TauSource::kDefault;
};

// 2 |p - 0.5|.
double confidence(double p);

// squash(1 - conf, tau); DomainError when tau <= 0.
double reject_probability(double conf, double tau);

Prediction predict_trinary(double p, double tau, RejectRule rule = RejectRule::kSquashCenter);

double rejection_rate(std::span<const double> posteriors, double tau,
                      RejectRule rule = RejectRule::kSquashCenter);

// Grid value i in 1..kTauGridSize: i / 200.
double tau_grid_value(int i);

struct TauProblem {
  // Posteriors of the labeled examples, with their labels.
  std::span<const double> labeled_posteriors;
  std::span<const Label> labels;
  // Whole (mostly unlabeled) pool on which the rejection cap is enforced.
  std::span<const double> pool_posteriors;
  CostParams costs;
  double cap = kDefaultRejectionCap;
  RejectRule rule = RejectRule::kSquashCenter;
};

// Per-example cost of everything the grid search needs to compare.
double labeled_cost(const TauProblem& problem, double tau);

// Minimizes the per-example cost over the labeled examples across the tau
// grid, skipping grid points whose rejection rate on the pool exceeds the cap.
// Ties go to the larger tau. Returns tau = 1 when nothing is feasible, and
// `current` unchanged (with a warning) when there are no labels.
RejectState optimize_tau(const TauProblem& problem, TauSource source,
                         const RejectState& current = {});

// Convenience form: the labeled subset is given as (position in the pool,
// label) pairs.
RejectState optimize_tau(std::span<const double> pool_posteriors,
                         std::span<const std::pair<std::size_t, Label>> labeled,
                         const CostParams& costs, double cap = kDefaultRejectionCap,
                         RejectRule rule = RejectRule::kSquashCenter,
                         TauSource source = TauSource::kOptimizedOnValidation,
                         const RejectState& current = {});

}  // namespace ballad

#endif  // BALLAD_REJECTION_HPP_
