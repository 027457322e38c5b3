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

#include "ballad/evaluation.hpp"

#include <cmath>
#include <random>

#include "ballad/error.hpp"
#include "gtest/gtest.h"
#include "oracles.hpp"

namespace ballad {
namespace {

using P = Prediction;

std::vector<int> Codes(const std::vector<P>& p) {
  std::vector<int> out;
  for (P v : p) out.push_back(v == P::kNormal ? 0 : v == P::kAnomaly ? 1 : 2);
  return out;
}

TEST(EmpiricalCost, Examples) {
  const CostParams c{1, 1, 0.05};
  const std::vector<Label> y{0, 1, 1};
  EXPECT_EQ(empirical_cost(std::vector<P>{P::kNormal, P::kAnomaly, P::kAnomaly}, y, c).cost, 0.0);
  EXPECT_DOUBLE_EQ(empirical_cost(std::vector<P>(3, P::kReject), y, c).cost, 0.05);
  const auto r = empirical_cost(std::vector<P>{P::kAnomaly, P::kReject, P::kNormal}, y, c);
  EXPECT_NEAR(r.cost, 2.05 / 3.0, 1e-15);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.rejected, 1u);
  EXPECT_NEAR(r.reject_fraction, 1.0 / 3.0, 1e-15);
}

TEST(EmpiricalCost, ConditionalVariant) {
  const CostParams c{2, 3, 0.1};
  const std::vector<P> p{P::kAnomaly, P::kNormal, P::kReject, P::kNormal, P::kAnomaly};
  const std::vector<Label> y{0, 0, 1, 1, 1};
  // 0.1 * 1/5 + 2 * 1/2 + 3 * 1/3
  EXPECT_NEAR(empirical_cost(p, y, c, CostVariant::kConditional).cost, 0.02 + 1.0 + 1.0, 1e-15);
  EXPECT_THROW(empirical_cost(p, std::vector<Label>(5, 0), c, CostVariant::kConditional),
               DomainError);
}

TEST(EmpiricalCost, MatchesOracleAndBounds) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cls(0, 2);
  std::uniform_int_distribution<int> lab(0, 1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 40;
    std::vector<P> p(n);
    std::vector<Label> y(n);
    for (int i = 0; i < n; ++i) {
      p[i] = static_cast<P>(cls(rng));
      y[i] = static_cast<Label>(lab(rng));
    }
    y[0] = 0;
    y[1] = 1;
    const CostParams c{u(rng), u(rng), u(rng)};
    std::vector<int> yi(y.begin(), y.end());
    const double per = empirical_cost(p, y, c).cost;
    EXPECT_NEAR(per, oracle::per_example_cost(Codes(p), yi, c.c_fp, c.c_fn, c.c_r), 1e-12);
    EXPECT_NEAR(empirical_cost(p, y, c, CostVariant::kConditional).cost,
                oracle::conditional_cost(Codes(p), yi, c.c_fp, c.c_fn, c.c_r), 1e-12);
    EXPECT_GE(per, 0.0);
    EXPECT_LE(per, std::max({c.c_fp, c.c_fn, c.c_r}) + 1e-12);
  }
}

TEST(EmpiricalCost, MonotoneInFalsePositives) {
  const CostParams c{1, 1, 0.05};
  std::vector<P> p(20, P::kNormal);
  const std::vector<Label> y(20, 0);
  double prev = empirical_cost(p, y, c).cost;
  for (int i = 0; i < 20; ++i) {
    p[i] = P::kAnomaly;
    const double now = empirical_cost(p, y, c).cost;
    EXPECT_GE(now, prev);
    prev = now;
  }
}

TEST(EmpiricalCost, LengthMismatch) {
  EXPECT_THROW(empirical_cost(std::vector<P>{P::kNormal}, std::vector<Label>{0, 1}, {}),
               ContractError);
}

TEST(Auc, Examples) {
  EXPECT_EQ(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<Label>{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(auc(std::vector<double>(6, 0.3), std::vector<Label>{0, 1, 0, 1, 0, 0}), 0.5);
  EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<Label>{1, 1}), DomainError);
}

TEST(Auc, RandomLabelsNearHalf) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(5000);
  std::vector<Label> y(5000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = u(rng);
    y[i] = u(rng) < 0.1;
  }
  EXPECT_NEAR(auc(s, y), 0.5, 0.05);
}

TEST(Auc, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> s(300), t(300);
  std::vector<Label> y(300);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = i % 7 == 0;
    s[i] = g(rng) + y[i];
    t[i] = std::exp(3.0 * s[i]) + 1.0;
  }
  EXPECT_DOUBLE_EQ(auc(s, y), auc(t, y));
}

TEST(Auc, MatchesPairCounting) {
  const std::vector<double> s{0.3, 0.3, 0.5, 0.1, 0.9, 0.5};
  const std::vector<Label> y{1, 0, 0, 0, 1, 1};
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
    }
  }
  EXPECT_DOUBLE_EQ(auc(s, y), wins / pairs);
}

TEST(Aggregate, SingleHistory) {
  const std::vector<CostCurve> curves{{"ballad", "entropy", {0.3, 0.2, 0.1}}};
  const auto rows = aggregate(curves, 2.0);
  ASSERT_EQ(rows.size(), 3u);
  for (int r = 0; r < 3; ++r) {
    EXPECT_EQ(rows[r].round, r + 1);
    EXPECT_DOUBLE_EQ(rows[r].budget_pct, 2.0 * (r + 1));
    EXPECT_EQ(rows[r].mean_cost, curves[0].costs[r]);
    EXPECT_EQ(rows[r].std_cost, 0.0);
  }
}

TEST(Aggregate, IdenticalHistoriesHaveZeroStd) {
  const std::vector<CostCurve> curves{{"a", "cosine", {0.4, 0.1}}, {"a", "cosine", {0.4, 0.1}}};
  for (const auto& row : aggregate(curves, 2.0)) EXPECT_EQ(row.std_cost, 0.0);
}

TEST(Aggregate, HandBuiltPair) {
  const std::vector<CostCurve> curves{{"x", "entropy", {0.1, 0.5}}, {"x", "entropy", {0.3, 0.1}},
                                      {"y", "entropy", {0.2}}};
  const auto rows = aggregate(curves, 1.0);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].strategy, "x");
  EXPECT_NEAR(rows[0].mean_cost, 0.2, 1e-15);
  EXPECT_NEAR(rows[0].std_cost, 0.1, 1e-15);
  EXPECT_NEAR(rows[1].mean_cost, 0.3, 1e-15);
  EXPECT_NEAR(rows[1].std_cost, 0.2, 1e-15);
  EXPECT_EQ(rows[2].strategy, "y");
  EXPECT_EQ(rows[2].count, 1u);
}

TEST(Aggregate, EmptyInputThrows) {
  EXPECT_THROW(aggregate(std::vector<CostCurve>{}, 2.0), ContractError);
}

TEST(SummaryCsv, Header) {
  const std::vector<CostCurve> curves{{"ballad", "entropy", {0.25}}};
  const auto csv = format_summary_csv(aggregate(curves, 2.0));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "strategy,reward_kind,round,budget_pct,mean_cost,std_cost");
  EXPECT_NE(csv.find("ballad,entropy,1,2,0.25,0"), std::string::npos);
}

}  // namespace
}  // namespace ballad
