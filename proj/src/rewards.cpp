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

#include "ballad/rewards.hpp"

#include <cmath>

#include "ballad/error.hpp"

namespace ballad {

std::string_view to_string(Side s) { return s == Side::kAL ? "AL" : "LR"; }

std::string_view to_string(RewardKind k) {
  return k == RewardKind::kEntropy ? "entropy" : "cosine";
}

namespace {

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

void check_traces(const ProbabilityTrace& prev, const ProbabilityTrace& curr) {
  if (prev.side != curr.side) throw ContractError("reward traces belong to different sides");
  if (prev.probs.size() != curr.probs.size()) {
    throw ContractError("reward traces cover different reference sets");
  }
}

}  // namespace

double entropy_term(double p, EntropyForm form) {
  if (form == EntropyForm::kSingleTerm) return plogp(p);
  return plogp(p) + plogp(1.0 - p);
}

double entropy_reward(std::span<const double> prev, std::span<const double> curr,
                      EntropyForm form) {
  if (prev.size() != curr.size()) throw ContractError("reward traces differ in length");
  if (prev.empty()) throw ContractError("empty reward trace");
  double total = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    total += std::fabs(entropy_term(curr[i], form) - entropy_term(prev[i], form));
  }
  return total / static_cast<double>(prev.size());
}

RewardSnapshot entropy_reward(const ProbabilityTrace& prev, const ProbabilityTrace& curr,
                              EntropyForm form) {
  check_traces(prev, curr);
  return {curr.side, RewardKind::kEntropy, entropy_reward(prev.probs, curr.probs, form),
          curr.round};
}

std::vector<std::uint8_t> binarize(std::span<const double> probs) {
  std::vector<std::uint8_t> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] > 0.5 ? 1 : 0;
  return out;
}

double cosine_reward(std::span<const std::uint8_t> prev, std::span<const std::uint8_t> curr) {
  if (prev.size() != curr.size()) throw ContractError("binarized outputs differ in length");
  if (prev.empty()) throw ContractError("empty binarized output");
  std::size_t dot = 0;
  std::size_t n_prev = 0;
  std::size_t n_curr = 0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    dot += static_cast<std::size_t>(prev[i] && curr[i]);
    n_prev += prev[i] != 0;
    n_curr += curr[i] != 0;
  }
  if (n_prev == 0 && n_curr == 0) return 0.0;
  if (n_prev == 0 || n_curr == 0) return 1.0;
  // For 0/1 vectors the squared norms are the counts of ones.
  return 1.0 - static_cast<double>(dot) / std::sqrt(static_cast<double>(n_prev) *
                                                    static_cast<double>(n_curr));
}

RewardSnapshot cosine_reward(const ProbabilityTrace& prev, const ProbabilityTrace& curr) {
  check_traces(prev, curr);
  const auto a = binarize(prev.probs);
  const auto b = binarize(curr.probs);
  return {curr.side, RewardKind::kCosine, cosine_reward(a, b), curr.round};
}

RewardSnapshot compute_reward(RewardKind kind, const ProbabilityTrace& prev,
                              const ProbabilityTrace& curr, EntropyForm form) {
  return kind == RewardKind::kEntropy ? entropy_reward(prev, curr, form)
                                      : cosine_reward(prev, curr);
}

}  // namespace ballad
