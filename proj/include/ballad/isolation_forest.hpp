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

#ifndef BALLAD_ISOLATION_FOREST_HPP_
#define BALLAD_ISOLATION_FOREST_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "ballad/data.hpp"

namespace ballad {

// Average path length of an unsuccessful search in a binary search tree of
// `n` points. c(0) = c(1) = 0.
double average_path_length(std::size_t n);

struct IsolationForestConfig {
  int n_trees = 100;
  // Capped at the number of rows when fitting.
  std::size_t subsample = 256;
  std::uint64_t seed = 0;
};

class IsolationTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t size = 0;
    std::uint32_t depth = 0;
  };

  // Path length of `x` including the c(size) adjustment at the leaf.
  double path_length(std::span<const double> x) const;
  std::uint32_t depth() const;
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  friend class IsolationForest;
  std::vector<Node> nodes_;
};

// Unsupervised isolation forest. Scores are 2^(-E[h(x)] / c(psi)); higher
// means more anomalous. Immutable after fit.
class IsolationForest {
 public:
  static IsolationForest fit(const Matrix& x, const IsolationForestConfig& config);

  double score(std::span<const double> x) const;
  std::vector<double> score_all(const Matrix& x) const;

  std::size_t subsample_size() const { return subsample_; }
  std::size_t n_trees() const { return trees_.size(); }
  std::uint32_t max_depth() const { return max_depth_; }
  double normalizer() const { return normalizer_; }
  const std::vector<IsolationTree>& trees() const { return trees_; }

 private:
  std::vector<IsolationTree> trees_;
  std::size_t subsample_ = 0;
  std::uint32_t max_depth_ = 0;
  double normalizer_ = 0.0;
};

}  // namespace ballad

#endif  // BALLAD_ISOLATION_FOREST_HPP_
