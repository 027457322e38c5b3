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

// Round-by-round allocation of a label budget between active learning
// (uncertainty-sampled training labels) and learning to reject (random
// validation labels), plus the two single-sided baselines.

#ifndef BALLAD_ALLOCATION_HPP_
#define BALLAD_ALLOCATION_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ballad/data.hpp"
#include "ballad/detector.hpp"
#include "ballad/evaluation.hpp"
#include "ballad/rejection.hpp"
#include "ballad/rewards.hpp"

namespace ballad {

enum class Strategy { kBallad, kAllInAL, kAllInLR };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);
RewardKind parse_reward_kind(std::string_view s);
CostVariant parse_cost_variant(std::string_view s);

struct BudgetLedger {
  int total = 0;      // B
  int per_round = 0;  // b
  int spent = 0;
  int rounds_done = 0;
  bool exhausted = false;

  int rounds_total() const { return per_round > 0 ? total / per_round : 0; }
};

// b = max(1, round(round_frac |train|)), B = b floor(round(budget_frac |train|) / b).
BudgetLedger make_budget(std::size_t train_size, double budget_frac, double round_frac);

struct AllocationConfig {
  Strategy strategy = Strategy::kBallad;
  RewardKind reward_kind = RewardKind::kEntropy;
  EntropyForm entropy_form = EntropyForm::kSingleTerm;
  CostParams costs;
  CostVariant cost_variant = CostVariant::kPerExample;
  RejectRule reject_rule = RejectRule::kSquashCenter;
  double rejection_cap = kDefaultRejectionCap;
  double default_tau = kDefaultTau;
  DetectorConfig detector;
  int per_round = 1;
  int total_budget = 2;
  std::uint64_t seed = 0;
  // Skips every model refit and threshold update; the loop still buys labels.
  bool freeze_updates = false;
};

struct RoundRecord {
  int round = 0;
  Side side = Side::kAL;
  std::vector<Index> queried;
  // Rewards seen when the side was chosen, and after the update.
  double reward_al_before = 0.0;
  double reward_lr_before = 0.0;
  double reward_al = 0.0;
  double reward_lr = 0.0;
  double tau = 0.0;
  double test_cost = 0.0;
  double test_auc = 0.0;  // NaN when the test split has one class
  int cumulative_labels = 0;
};

struct PendingQuery {
  int round = 0;
  Side side = Side::kAL;
  std::vector<Index> indices;
  // True for the seeding rounds that draw uniformly at random.
  bool initial = false;
};

// Supplies the true label of a dataset row.
using Oracle = std::function<Label(Index)>;
Oracle simulated_oracle(std::shared_ptr<const Dataset> ds);

// One allocation run. Construction fits the unsupervised prior and sets the
// default rejection threshold; each round then plans a query, receives the
// labels and updates the chosen side.
//
// Round 1 and 2 of the adaptive strategy buy b random validation labels and
// b random training labels to seed both rewards. The baselines use their own
// acquisition from round 1.
class AllocationLoop {
 public:
  AllocationLoop(std::shared_ptr<const Dataset> ds, SplitView split, AllocationConfig config);

  bool done() const;

  // The batch awaiting labels, planned on first access and stable until the
  // labels are committed. nullopt once the budget is used up.
  std::optional<PendingQuery> pending();

  // Commits labels for exactly the pending indices and applies the update.
  // ContractError on a wrong index set, ValidationError on non-binary labels.
  const RoundRecord& commit(const std::map<Index, Label>& labels);

  // pending() + oracle + commit(). No-op (with a warning) when done.
  void step(const Oracle& oracle);
  void run_to_end(const Oracle& oracle);

  Side choose_side() const;
  std::vector<Index> query_al(int b) const;
  std::vector<Index> query_lr(int b);

  const BudgetLedger& ledger() const { return ledger_; }
  const RewardSnapshot& reward_al() const { return reward_al_; }
  const RewardSnapshot& reward_lr() const { return reward_lr_; }
  const RejectState& tau_state() const { return tau_; }
  const LabelStore& labels() const { return labels_; }
  const SemiSupervisedDetector& model() const { return model_; }
  const std::vector<RoundRecord>& history() const { return history_; }
  const SplitView& split() const { return split_; }
  const AllocationConfig& config() const { return config_; }
  const Dataset& dataset() const { return *ds_; }
  double initial_test_cost() const { return initial_test_cost_; }

  const std::vector<double>& train_posteriors() const { return post_train_; }
  const std::vector<double>& val_posteriors() const { return post_val_; }
  const std::vector<double>& test_posteriors() const { return post_test_; }

 private:
  PendingQuery plan();
  void refresh_posteriors();
  std::vector<double> reject_trace() const;
  void optimize_threshold(Pool pool);
  double test_cost() const;
  double test_auc() const;

  std::shared_ptr<const Dataset> ds_;
  SplitView split_;
  AllocationConfig config_;
  std::mt19937_64 rng_;
  LabelStore labels_;
  SemiSupervisedDetector model_;
  RejectState tau_;
  RewardSnapshot reward_al_{Side::kAL, RewardKind::kEntropy, 0.0, 0};
  RewardSnapshot reward_lr_{Side::kLR, RewardKind::kEntropy, 0.0, 0};
  BudgetLedger ledger_;
  std::vector<RoundRecord> history_;
  std::optional<PendingQuery> pending_;
  std::vector<double> post_train_;
  std::vector<double> post_val_;
  std::vector<double> post_test_;
  double initial_test_cost_ = 0.0;
};

// Constructs the loop and runs the two seeding rounds with `oracle`.
AllocationLoop initialize(std::shared_ptr<const Dataset> ds, SplitView split,
                          AllocationConfig config, const Oracle& oracle);

struct RunOptions {
  Strategy strategy = Strategy::kBallad;
  RewardKind reward_kind = RewardKind::kEntropy;
  double budget_frac = 0.30;
  double round_frac = 0.02;
  CostParams costs;
  CostVariant cost_variant = CostVariant::kPerExample;
  RejectRule reject_rule = RejectRule::kSquashCenter;
  EntropyForm entropy_form = EntropyForm::kSingleTerm;
  DetectorConfig detector;
  std::uint64_t seed = 0;
};

// Builds the config (budget from the training-pool size) for a split.
AllocationConfig make_config(const RunOptions& opts, const SplitView& split);

// Full simulated run on a fresh split drawn with `opts.seed`.
std::vector<RoundRecord> run(std::shared_ptr<const Dataset> ds, const RunOptions& opts);

// round,side,reward_AL,reward_LR,tau,test_cost,cumulative_labels
inline constexpr std::string_view kHistoryColumns =
    "round,side,reward_AL,reward_LR,tau,test_cost,cumulative_labels";
std::string format_history_row(const RoundRecord& r);
std::string format_history_csv(const std::vector<RoundRecord>& history);

}  // namespace ballad

#endif  // BALLAD_ALLOCATION_HPP_
