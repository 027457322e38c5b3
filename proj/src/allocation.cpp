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

#include "ballad/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "ballad/error.hpp"

namespace ballad {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kBallad:
      return "ballad";
    case Strategy::kAllInAL:
      return "all-in-al";
    case Strategy::kAllInLR:
      return "all-in-lr";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "ballad") return Strategy::kBallad;
  if (s == "all-in-al") return Strategy::kAllInAL;
  if (s == "all-in-lr") return Strategy::kAllInLR;
  throw ValidationError(fmt::format("unknown strategy '{}'", s));
}

RewardKind parse_reward_kind(std::string_view s) {
  if (s == "entropy") return RewardKind::kEntropy;
  if (s == "cosine") return RewardKind::kCosine;
  throw ValidationError(fmt::format("unknown reward kind '{}'", s));
}

CostVariant parse_cost_variant(std::string_view s) {
  if (s == "per-example") return CostVariant::kPerExample;
  if (s == "conditional") return CostVariant::kConditional;
  throw ValidationError(fmt::format("unknown cost variant '{}'", s));
}

BudgetLedger make_budget(std::size_t train_size, double budget_frac, double round_frac) {
  if (!(budget_frac > 0.0 && budget_frac <= 1.0) || !(round_frac > 0.0 && round_frac <= 1.0)) {
    throw BudgetError("budget and round fractions must be in (0,1]");
  }
  const auto n = static_cast<double>(train_size);
  BudgetLedger ledger;
  ledger.per_round = static_cast<int>(std::max<long long>(1, std::llround(round_frac * n)));
  const auto raw_total = static_cast<int>(std::llround(budget_frac * n));
  ledger.total = ledger.per_round * (raw_total / ledger.per_round);
  if (ledger.total < ledger.per_round) {
    throw BudgetError(fmt::format("budget of {} labels does not cover one round of {}", raw_total,
                                  ledger.per_round));
  }
  return ledger;
}

Oracle simulated_oracle(std::shared_ptr<const Dataset> ds) {
  return [ds = std::move(ds)](Index i) { return ds->truth.at(i); };
}

AllocationLoop::AllocationLoop(std::shared_ptr<const Dataset> ds, SplitView split,
                               AllocationConfig config)
    : ds_(std::move(ds)), split_(std::move(split)), config_(std::move(config)), labels_(split_) {
  validate_dataset(*ds_);
  validate_costs(config_.costs, ds_->gamma);
  const int b = config_.per_round;
  const int total = config_.total_budget;
  if (b < 1) throw BudgetError("per-round batch must be at least one label");
  if (total < b || total % b != 0) {
    throw BudgetError(fmt::format("budget {} is not a positive multiple of the batch {}", total, b));
  }
  if (config_.strategy == Strategy::kBallad && total < 2 * b) {
    throw BudgetError("the adaptive strategy needs at least two rounds for its seeding batches");
  }
  if (2 * static_cast<std::size_t>(b) > split_.train.size() ||
      2 * static_cast<std::size_t>(b) > split_.val.size()) {
    throw BudgetError(fmt::format("batch {} exceeds half the training ({}) or validation ({}) pool",
                                  b, split_.train.size(), split_.val.size()));
  }
  ledger_.total = total;
  ledger_.per_round = b;

  std::seed_seq seq{static_cast<std::uint32_t>(config_.seed),
                    static_cast<std::uint32_t>(config_.seed >> 32), 0x5eedu};
  rng_.seed(seq);

  DetectorConfig det = config_.detector;
  det.forest.seed = config_.seed;
  model_ = SemiSupervisedDetector::fit(ds_->features, split_.train, ds_->gamma, det);
  tau_ = RejectState{config_.default_tau, TauSource::kDefault};
  reward_al_ = {Side::kAL, config_.reward_kind, 0.0, 0};
  reward_lr_ = {Side::kLR, config_.reward_kind, 0.0, 0};
  refresh_posteriors();
  initial_test_cost_ = test_cost();
}

bool AllocationLoop::done() const {
  return ledger_.exhausted || ledger_.rounds_done >= ledger_.rounds_total();
}

Side AllocationLoop::choose_side() const {
  return reward_al_.value >= reward_lr_.value ? Side::kAL : Side::kLR;
}

std::vector<Index> AllocationLoop::query_al(int b) const {
  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < split_.train.size(); ++k) {
    if (!labels_.contains(split_.train[k])) candidates.push_back(k);
  }
  auto less_confident = [&](std::size_t a, std::size_t c) {
    const double ca = confidence(post_train_[a]);
    const double cc = confidence(post_train_[c]);
    if (ca != cc) return ca < cc;
    return split_.train[a] < split_.train[c];
  };
  const std::size_t take = std::min(candidates.size(), static_cast<std::size_t>(std::max(b, 0)));
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), less_confident);
  std::vector<Index> out;
  out.reserve(take);
  for (std::size_t k = 0; k < take; ++k) out.push_back(split_.train[candidates[k]]);
  return out;
}

namespace {

std::vector<Index> draw_unlabeled(const std::vector<Index>& pool, const LabelStore& labels, int b,
                                  std::mt19937_64& rng) {
  std::vector<Index> free;
  for (Index i : pool) {
    if (!labels.contains(i)) free.push_back(i);
  }
  const std::size_t take = std::min(free.size(), static_cast<std::size_t>(std::max(b, 0)));
  for (std::size_t k = 0; k < take; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, free.size() - 1);
    std::swap(free[k], free[pick(rng)]);
  }
  free.resize(take);
  std::sort(free.begin(), free.end());
  return free;
}

// Positions of the labeled rows inside a sorted pool index list.
void gather_labeled(const std::vector<Index>& pool, const std::map<Index, Label>& labels,
                    const std::vector<double>& pool_posteriors, std::vector<double>& out_p,
                    std::vector<Label>& out_y) {
  for (const auto& [idx, y] : labels) {
    auto it = std::lower_bound(pool.begin(), pool.end(), idx);
    out_p.push_back(pool_posteriors[static_cast<std::size_t>(it - pool.begin())]);
    out_y.push_back(y);
  }
}

}  // namespace

std::vector<Index> AllocationLoop::query_lr(int b) { return draw_unlabeled(split_.val, labels_, b, rng_); }

PendingQuery AllocationLoop::plan() {
  PendingQuery q;
  q.round = ledger_.rounds_done + 1;
  const int b = ledger_.per_round;
  switch (config_.strategy) {
    case Strategy::kAllInAL:
      q.side = Side::kAL;
      break;
    case Strategy::kAllInLR:
      q.side = Side::kLR;
      break;
    case Strategy::kBallad:
      if (q.round == 1) {
        q.side = Side::kLR;
        q.initial = true;
      } else if (q.round == 2) {
        q.side = Side::kAL;
        q.initial = true;
      } else {
        q.side = choose_side();
      }
      break;
  }
  if (q.side == Side::kLR) {
    q.indices = query_lr(b);
  } else if (q.initial) {
    q.indices = draw_unlabeled(split_.train, labels_, b, rng_);
  } else {
    q.indices = query_al(b);
  }
  return q;
}

std::optional<PendingQuery> AllocationLoop::pending() {
  if (pending_) return pending_;
  if (done()) return std::nullopt;
  PendingQuery q = plan();
  if (q.indices.empty()) {
    spdlog::warn("no unlabeled examples left in the {} pool; budget exhausted", to_string(q.side));
    ledger_.exhausted = true;
    return std::nullopt;
  }
  pending_ = std::move(q);
  return pending_;
}

void AllocationLoop::refresh_posteriors() {
  post_train_ = model_.posteriors(ds_->features, split_.train);
  post_val_ = model_.posteriors(ds_->features, split_.val);
  post_test_ = model_.posteriors(ds_->features, split_.test);
}

std::vector<double> AllocationLoop::reject_trace() const {
  std::vector<double> out(post_val_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = reject_probability(confidence(post_val_[i]), tau_.tau);
  }
  return out;
}

void AllocationLoop::optimize_threshold(Pool pool) {
  const bool train = pool == Pool::kTrain;
  const auto& idx = train ? split_.train : split_.val;
  const auto& post = train ? post_train_ : post_val_;
  std::vector<double> lp;
  std::vector<Label> ly;
  gather_labeled(idx, labels_.pool(pool), post, lp, ly);
  TauProblem problem{lp, ly, post, config_.costs, config_.rejection_cap, config_.reject_rule};
  tau_ = optimize_tau(problem, train ? TauSource::kOptimizedOnTrain : TauSource::kOptimizedOnValidation,
                      tau_);
}

double AllocationLoop::test_cost() const {
  std::vector<Prediction> preds(post_test_.size());
  std::vector<Label> truth(post_test_.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    preds[i] = predict_trinary(post_test_[i], tau_.tau, config_.reject_rule);
    truth[i] = ds_->truth[split_.test[i]];
  }
  return empirical_cost(preds, truth, config_.costs, config_.cost_variant).cost;
}

double AllocationLoop::test_auc() const {
  std::vector<Label> truth(post_test_.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = ds_->truth[split_.test[i]];
    pos += truth[i];
  }
  if (pos == 0 || pos == truth.size()) return std::numeric_limits<double>::quiet_NaN();
  return auc(post_test_, truth);
}

const RoundRecord& AllocationLoop::commit(const std::map<Index, Label>& labels) {
  if (!pending_) throw ContractError("no batch is awaiting labels");
  const PendingQuery& q = *pending_;
  std::vector<Index> keys;
  keys.reserve(labels.size());
  for (const auto& [idx, y] : labels) keys.push_back(idx);
  std::vector<Index> expected = q.indices;
  std::sort(expected.begin(), expected.end());
  if (keys != expected) {
    throw ContractError(fmt::format("labels must cover exactly the pending indices [{}]",
                                    fmt::join(expected, ", ")));
  }
  for (const auto& [idx, y] : labels) {
    if (y > 1) throw ValidationError(fmt::format("label for index {} is not 0 or 1", idx));
  }

  const Pool pool = q.side == Side::kAL ? Pool::kTrain : Pool::kValidation;
  for (const auto& [idx, y] : labels) labels_.add(pool, idx, y);

  RoundRecord rec;
  rec.round = q.round;
  rec.side = q.side;
  rec.queried = q.indices;
  rec.reward_al_before = reward_al_.value;
  rec.reward_lr_before = reward_lr_.value;

  if (!config_.freeze_updates) {
    if (q.side == Side::kAL) {
      ProbabilityTrace prev{Side::kAL, post_train_, q.round - 1};
      model_ = model_.refit(ds_->features, labels_.train());
      refresh_posteriors();
      ProbabilityTrace curr{Side::kAL, post_train_, q.round};
      reward_al_ = compute_reward(config_.reward_kind, prev, curr, config_.entropy_form);
      // The single-sided AL baseline sets tau from its (biased) training labels.
      if (config_.strategy == Strategy::kAllInAL) optimize_threshold(Pool::kTrain);
    } else {
      ProbabilityTrace prev{Side::kLR, reject_trace(), q.round - 1};
      optimize_threshold(Pool::kValidation);
      ProbabilityTrace curr{Side::kLR, reject_trace(), q.round};
      reward_lr_ = compute_reward(config_.reward_kind, prev, curr, config_.entropy_form);
    }
  }

  ledger_.spent += static_cast<int>(labels.size());
  ledger_.rounds_done += 1;
  if (static_cast<int>(labels.size()) < ledger_.per_round) ledger_.exhausted = true;

  rec.reward_al = reward_al_.value;
  rec.reward_lr = reward_lr_.value;
  rec.tau = tau_.tau;
  rec.test_cost = test_cost();
  rec.test_auc = test_auc();
  rec.cumulative_labels = ledger_.spent;
  pending_.reset();
  history_.push_back(std::move(rec));
  return history_.back();
}

void AllocationLoop::step(const Oracle& oracle) {
  auto q = pending();
  if (!q) {
    spdlog::warn("allocation budget exhausted; step ignored");
    return;
  }
  std::map<Index, Label> answers;
  for (Index i : q->indices) answers.emplace(i, oracle(i));
  commit(answers);
}

void AllocationLoop::run_to_end(const Oracle& oracle) {
  while (!done()) {
    if (!pending()) break;
    step(oracle);
  }
}

AllocationLoop initialize(std::shared_ptr<const Dataset> ds, SplitView split,
                          AllocationConfig config, const Oracle& oracle) {
  AllocationLoop loop(std::move(ds), std::move(split), std::move(config));
  for (int r = 0; r < 2 && !loop.done(); ++r) loop.step(oracle);
  return loop;
}

AllocationConfig make_config(const RunOptions& opts, const SplitView& split) {
  const BudgetLedger budget = make_budget(split.train.size(), opts.budget_frac, opts.round_frac);
  AllocationConfig cfg;
  cfg.strategy = opts.strategy;
  cfg.reward_kind = opts.reward_kind;
  cfg.entropy_form = opts.entropy_form;
  cfg.costs = opts.costs;
  cfg.cost_variant = opts.cost_variant;
  cfg.reject_rule = opts.reject_rule;
  cfg.detector = opts.detector;
  cfg.per_round = budget.per_round;
  cfg.total_budget = budget.total;
  cfg.seed = opts.seed;
  return cfg;
}

std::vector<RoundRecord> run(std::shared_ptr<const Dataset> ds, const RunOptions& opts) {
  SplitView split = stratified_split(*ds, opts.seed);
  AllocationConfig cfg = make_config(opts, split);
  Oracle oracle = simulated_oracle(ds);
  AllocationLoop loop(std::move(ds), std::move(split), std::move(cfg));
  loop.run_to_end(oracle);
  return loop.history();
}

std::string format_history_row(const RoundRecord& r) {
  return fmt::format("{},{},{},{},{},{},{}", r.round, to_string(r.side), r.reward_al, r.reward_lr,
                     r.tau, r.test_cost, r.cumulative_labels);
}

std::string format_history_csv(const std::vector<RoundRecord>& history) {
  std::string out(kHistoryColumns);
  out += '\n';
  for (const auto& r : history) {
    out += format_history_row(r);
    out += '\n';
  }
  return out;
}

}  // namespace ballad
