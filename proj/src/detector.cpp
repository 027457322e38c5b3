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

#include "ballad/detector.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ballad/error.hpp"

namespace ballad {

double squash(double s, double lambda) {
  if (!(s >= 0.0)) throw DomainError(fmt::format("squash: score {} is negative", s));
  if (!(lambda > 0.0)) throw DomainError(fmt::format("squash: threshold {} is not positive", lambda));
  const double r = s / lambda;
  return 1.0 - std::exp2(-(r * r));
}

double quantile_threshold(std::span<const double> scores, double gamma) {
  if (scores.empty()) throw ContractError("quantile of an empty score vector");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("contamination must be in (0,1)");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    spdlog::warn("all {} scores are identical; posteriors will be 0.5 everywhere",
                 sorted.size());
    return sorted.front();
  }
  const double pos = (1.0 - gamma) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double clamp_probability(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

Standardizer::Standardizer(const Matrix& x) : mean_(x.cols(), 0.0), inv_std_(x.cols(), 0.0) {
  const auto n = static_cast<double>(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) mean_[j] += x(i, j);
  }
  for (double& m : mean_) m /= n;
  std::vector<double> var(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double d = x(i, j) - mean_[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt(var[j] / n);
    inv_std_[j] = sd > 0.0 ? 1.0 / sd : 0.0;
  }
}

double Standardizer::squared_distance(std::span<const double> a,
                                      std::span<const double> b) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < inv_std_.size(); ++j) {
    const double d = (a[j] - b[j]) * inv_std_[j];
    acc += d * d;
  }
  return acc;
}

SemiSupervisedDetector SemiSupervisedDetector::fit(const Matrix& features,
                                                   std::span<const Index> train_idx,
                                                   double gamma, const DetectorConfig& config) {
  if (train_idx.empty()) throw ContractError("detector needs training rows");
  SemiSupervisedDetector det;
  det.config_ = config;
  det.train_idx_.assign(train_idx.begin(), train_idx.end());
  const Matrix train = features.select_rows(train_idx);

  det.forest_ = std::make_shared<const IsolationForest>(IsolationForest::fit(train, config.forest));
  det.threshold_ = quantile_threshold(det.forest_->score_all(train), gamma);
  det.standardizer_ = Standardizer(train);

  // Mean pairwise distance over an evenly strided subset of the pool.
  const std::size_t m = std::min(train.rows(), std::max<std::size_t>(config.bandwidth_sample, 2));
  std::vector<std::size_t> sample(m);
  for (std::size_t k = 0; k < m; ++k) sample[k] = k * train.rows() / m;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      total += std::sqrt(det.standardizer_.squared_distance(train.row(sample[a]), train.row(sample[b])));
      ++pairs;
    }
  }
  const double mean_dist = pairs > 0 ? total / static_cast<double>(pairs) : 0.0;
  det.bandwidth_ = mean_dist > 0.0 ? config.bandwidth_scale * mean_dist : 1.0;
  return det;
}

SemiSupervisedDetector SemiSupervisedDetector::refit(const Matrix& features,
                                                     const std::map<Index, Label>& labels) const {
  SemiSupervisedDetector out = *this;
  out.labeled_x_.clear();
  out.labeled_y_.clear();
  for (const auto& [idx, y] : labels) {
    if (!std::binary_search(train_idx_.begin(), train_idx_.end(), idx)) {
      throw ContractError(fmt::format("labeled row {} is not a training row", idx));
    }
    auto row = features.row(idx);
    out.labeled_x_.emplace_back(row.begin(), row.end());
    out.labeled_y_.push_back(y);
  }
  return out;
}

double SemiSupervisedDetector::prior_score(std::span<const double> x) const {
  return forest_->score(x);
}

double SemiSupervisedDetector::prior_probability(std::span<const double> x) const {
  if (threshold_ <= 0.0) return 0.5;
  return clamp_probability(squash(prior_score(x), threshold_));
}

double SemiSupervisedDetector::posterior(std::span<const double> x) const {
  const double p0 = prior_probability(x);
  if (labeled_y_.empty()) return p0;
  const double inv_two_var = 1.0 / (2.0 * bandwidth_ * bandwidth_);
  double weight_sum = 0.0;
  double positive_sum = 0.0;
  double max_weight = 0.0;
  for (std::size_t k = 0; k < labeled_y_.size(); ++k) {
    const double w = std::exp(-standardizer_.squared_distance(x, labeled_x_[k]) * inv_two_var);
    weight_sum += w;
    positive_sum += labeled_y_[k] ? w : 0.0;
    max_weight = std::max(max_weight, w);
  }
  const double prior_weight = 1.0 - max_weight;
  const double denom = prior_weight + weight_sum;
  if (denom <= 0.0) return p0;
  return clamp_probability((prior_weight * p0 + positive_sum) / denom);
}

std::vector<double> SemiSupervisedDetector::posteriors(const Matrix& features,
                                                       std::span<const Index> rows) const {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = posterior(features.row(rows[i]));
  return out;
}

std::vector<double> SemiSupervisedDetector::prior_scores(const Matrix& features,
                                                         std::span<const Index> rows) const {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = prior_score(features.row(rows[i]));
  return out;
}

}  // namespace ballad
