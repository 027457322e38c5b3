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

#include "ballad/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ballad/error.hpp"

namespace ballad {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

struct TreeBuilder {
  const Matrix& x;
  std::uint32_t max_depth;
  std::mt19937_64& rng;
  std::vector<IsolationTree::Node>& nodes;
  std::vector<Index> rows;
  std::vector<int> candidates;

  std::uint32_t build(std::size_t begin, std::size_t end, std::uint32_t depth) {
    const auto id = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back({});
    nodes[id].size = static_cast<std::uint32_t>(end - begin);
    nodes[id].depth = depth;
    if (depth >= max_depth || end - begin <= 1) return id;

    // Only features that vary inside the node can split it.
    candidates.clear();
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double lo = x(rows[begin], j);
      for (std::size_t r = begin + 1; r < end; ++r) {
        if (x(rows[r], j) != lo) {
          candidates.push_back(static_cast<int>(j));
          break;
        }
      }
    }
    if (candidates.empty()) return id;

    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const int feature = candidates[pick(rng)];
    double lo = x(rows[begin], feature);
    double hi = lo;
    for (std::size_t r = begin; r < end; ++r) {
      lo = std::min(lo, x(rows[r], feature));
      hi = std::max(hi, x(rows[r], feature));
    }
    std::uniform_real_distribution<double> cut(lo, hi);
    // Values <= threshold go left; threshold < hi keeps both sides nonempty.
    double threshold = std::min(cut(rng), std::nextafter(hi, lo));

    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](Index r) { return x(r, feature) <= threshold; });
    const auto split = static_cast<std::size_t>(mid - rows.begin());

    nodes[id].feature = feature;
    nodes[id].threshold = threshold;
    const std::uint32_t left = build(begin, split, depth + 1);
    const std::uint32_t right = build(split, end, depth + 1);
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
  }
};

}  // namespace

double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  const double m = static_cast<double>(n - 1);
  return 2.0 * (std::log(m) + kEulerGamma) - 2.0 * m / static_cast<double>(n);
}

double IsolationTree::path_length(std::span<const double> x) const {
  std::uint32_t id = 0;
  while (nodes_[id].feature >= 0) {
    const Node& node = nodes_[id];
    id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return static_cast<double>(nodes_[id].depth) + average_path_length(nodes_[id].size);
}

std::uint32_t IsolationTree::depth() const {
  std::uint32_t d = 0;
  for (const Node& node : nodes_) d = std::max(d, node.depth);
  return d;
}

IsolationForest IsolationForest::fit(const Matrix& x, const IsolationForestConfig& config) {
  if (x.rows() == 0) throw ContractError("isolation forest needs at least one row");
  if (config.n_trees < 1) throw ContractError("isolation forest needs at least one tree");
  if (config.subsample < 1) throw ContractError("subsample size must be positive");

  IsolationForest forest;
  forest.subsample_ = std::min(config.subsample, x.rows());
  forest.max_depth_ = static_cast<std::uint32_t>(
      std::ceil(std::log2(static_cast<double>(forest.subsample_))));
  forest.normalizer_ = average_path_length(forest.subsample_);
  forest.trees_.resize(static_cast<std::size_t>(config.n_trees));

  std::vector<Index> all(x.rows());
  std::iota(all.begin(), all.end(), Index{0});

  for (std::size_t t = 0; t < forest.trees_.size(); ++t) {
    // One stream per tree so construction order never affects the result.
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);

    std::vector<Index> rows = all;
    for (std::size_t i = 0; i < forest.subsample_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
      std::swap(rows[i], rows[pick(rng)]);
    }
    rows.resize(forest.subsample_);

    auto& nodes = forest.trees_[t].nodes_;
    TreeBuilder builder{x, forest.max_depth_, rng, nodes, std::move(rows), {}};
    builder.build(0, builder.rows.size(), 0);
  }
  return forest;
}

double IsolationForest::score(std::span<const double> x) const {
  if (normalizer_ <= 0.0) return 0.5;
  double total = 0.0;
  for (const auto& tree : trees_) total += tree.path_length(x);
  const double mean = total / static_cast<double>(trees_.size());
  return std::exp2(-mean / normalizer_);
}

std::vector<double> IsolationForest::score_all(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = score(x.row(i));
  return out;
}

}  // namespace ballad
