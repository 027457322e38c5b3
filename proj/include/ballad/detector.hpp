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

// Semi-supervised anomaly detector built on an isolation-forest prior, and
// the squashing calibration that turns scores into probabilities.

#ifndef BALLAD_DETECTOR_HPP_
#define BALLAD_DETECTOR_HPP_

#include <map>
#include <memory>
#include <span>
#include <vector>

#include "ballad/data.hpp"
#include "ballad/isolation_forest.hpp"

namespace ballad {

// 1 - 2^(-s^2 / lambda^2). Maps s = lambda to 0.5; strictly increasing in s.
// Throws DomainError for s < 0 or lambda <= 0.
double squash(double s, double lambda);

// Empirical (1 - gamma)-quantile of `scores`, linear interpolation between
// the closest order statistics.
double quantile_threshold(std::span<const double> scores, double gamma);

// Probabilities are kept inside [kProbFloor, 1 - kProbFloor].
inline constexpr double kProbFloor = 1e-6;
double clamp_probability(double p);

struct DetectorConfig {
  IsolationForestConfig forest;
  // Number of training points used to estimate the kernel bandwidth.
  std::size_t bandwidth_sample = 500;
  // Multiplies the mean pairwise distance to get the bandwidth.
  double bandwidth_scale = 1.0;
};

// Per-feature z-scoring; zero-variance features are dropped from distances.
class Standardizer {
 public:
  Standardizer() = default;
  explicit Standardizer(const Matrix& x);
  double squared_distance(std::span<const double> a, std::span<const double> b) const;

 private:
  std::vector<double> mean_;
  std::vector<double> inv_std_;  // 0 for dropped features
};

// Prior-driven away from labels, label-driven next to them.
//
// With labeled points z (label y_z) and kernel K(x,z) = exp(-|x~ - z~|^2 /
// (2 sigma^2)) over standardized coordinates, the posterior is
//
//   p(x) = (w(x) p0(x) + sum_z y_z K(x,z)) / (w(x) + sum_z K(x,z)),
//   w(x) = 1 - max_z K(x,z),
//
// where p0 = squash(prior_score, t_prior). Without labels p = p0; on top of
// a labeled point the prior weight vanishes and p is the kernel average of
// the labels.
class SemiSupervisedDetector {
 public:
  // Fits the prior on the training rows of `features` and sets the decision
  // threshold at the (1 - gamma)-quantile of the training scores.
  static SemiSupervisedDetector fit(const Matrix& features, std::span<const Index> train_idx,
                                    double gamma, const DetectorConfig& config);

  // Replaces the labeled points with `labels` (dataset row -> label), all of
  // which must be training rows. The prior is shared, not refitted.
  SemiSupervisedDetector refit(const Matrix& features,
                               const std::map<Index, Label>& labels) const;

  double prior_score(std::span<const double> x) const;
  // Clamped squash(prior_score(x), t_prior).
  double prior_probability(std::span<const double> x) const;
  double posterior(std::span<const double> x) const;

  std::vector<double> posteriors(const Matrix& features, std::span<const Index> rows) const;
  std::vector<double> prior_scores(const Matrix& features, std::span<const Index> rows) const;

  double threshold() const { return threshold_; }
  double bandwidth() const { return bandwidth_; }
  std::size_t label_count() const { return labeled_y_.size(); }
  const IsolationForest& forest() const { return *forest_; }

 private:
  std::shared_ptr<const IsolationForest> forest_;
  Standardizer standardizer_;
  double threshold_ = 0.0;
  double bandwidth_ = 1.0;
  std::vector<Index> train_idx_;
  DetectorConfig config_;
  std::vector<std::vector<double>> labeled_x_;
  std::vector<Label> labeled_y_;
};

}  // namespace ballad

#endif  // BALLAD_DETECTOR_HPP_
