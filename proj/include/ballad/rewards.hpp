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

// Rewards measuring how much the last label batch moved the detector.

#ifndef BALLAD_REWARDS_HPP_
#define BALLAD_REWARDS_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ballad {

enum class Side { kAL, kLR };
enum class RewardKind { kEntropy, kCosine };

std::string_view to_string(Side s);
std::string_view to_string(RewardKind k);

enum class EntropyForm {
  // -p log2 p
  kSingleTerm,
  // -p log2 p - (1-p) log2 (1-p)
  kBinary,
};

struct RewardSnapshot {
  Side side = Side::kAL;
  RewardKind kind = RewardKind::kEntropy;
  double value = 0.0;
  int round = 0;
};

// Probabilities of one side over a fixed reference set: posteriors over the
// training pool for AL, rejection probabilities over the validation pool
// for LR.
struct ProbabilityTrace {
  Side side = Side::kAL;
  std::vector<double> probs;
  int round = 0;
};

// -p log2 p, with 0 at p = 0.
double entropy_term(double p, EntropyForm form = EntropyForm::kSingleTerm);

// Mean |H(curr) - H(prev)| over the reference set.
double entropy_reward(std::span<const double> prev, std::span<const double> curr,
                      EntropyForm form = EntropyForm::kSingleTerm);
RewardSnapshot entropy_reward(const ProbabilityTrace& prev, const ProbabilityTrace& curr,
                              EntropyForm form = EntropyForm::kSingleTerm);

// 1 where p > 0.5.
std::vector<std::uint8_t> binarize(std::span<const double> probs);

// One minus cosine similarity. Both all-zero -> 0; exactly one all-zero -> 1.
double cosine_reward(std::span<const std::uint8_t> prev, std::span<const std::uint8_t> curr);
RewardSnapshot cosine_reward(const ProbabilityTrace& prev, const ProbabilityTrace& curr);

// Dispatches on `kind`.
RewardSnapshot compute_reward(RewardKind kind, const ProbabilityTrace& prev,
                              const ProbabilityTrace& curr,
                              EntropyForm form = EntropyForm::kSingleTerm);

}  // namespace ballad

#endif  // BALLAD_REWARDS_HPP_
