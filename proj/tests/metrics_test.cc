// Copyright 2026 The fedrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include "fedrec/metrics.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "testing/oracles.h"

namespace fedrec {
namespace {

// Brute-force rank: count items that sort ahead of the test item.
int OracleRank(const std::vector<ScoredItem>& scored, ItemId test) {
  double test_score = 0.0;
  for (const ScoredItem& s : scored) {
    if (s.item == test) test_score = s.score;
  }
  int ahead = 0;
  for (const ScoredItem& s : scored) {
    if (s.score > test_score || (s.score == test_score && s.item < test)) {
      ++ahead;
    }
  }
  return ahead + 1;
}

// One-dimensional dot-product model whose score for item m is item_scores[m].
ClientModel FixedScores(const std::vector<double>& item_scores) {
  ClientModel model;
  model.spec = {ScoreKind::kDotProduct, {}};
  model.user_embedding = Eigen::VectorXd::Ones(1);
  model.item_embedding.resize(static_cast<Eigen::Index>(item_scores.size()), 1);
  for (size_t m = 0; m < item_scores.size(); ++m) {
    model.item_embedding(static_cast<Eigen::Index>(m), 0) = item_scores[m];
  }
  return model;
}

TEST(RankOfTestTest, Examples) {
  EXPECT_EQ(*RankOfTest(std::vector<ScoredItem>{{4, 0.1}, {7, 0.9}, {2, 0.5}}, 7), 1);
  EXPECT_EQ(*RankOfTest(std::vector<ScoredItem>{{0, 0.9}, {1, 0.8}, {2, 0.7}}, 1), 2);
  std::vector<ScoredItem> equal;
  for (int m = 100; m > 0; --m) equal.push_back({m, 0.5});
  EXPECT_EQ(*RankOfTest(equal, 1), 1);
  EXPECT_EQ(*RankOfTest(equal, 100), 100);
}

TEST(RankOfTestTest, MissingItemIsError) {
  EXPECT_FALSE(RankOfTest(std::vector<ScoredItem>{{1, 0.5}}, 2).ok());
}

TEST(RankOfTestTest, MatchesBruteForceOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.UniformInt(30));
    std::vector<ScoredItem> scored;
    for (int m = 0; m < n; ++m) {
      // Coarse scores force plenty of ties.
      scored.push_back({m * 3, static_cast<double>(rng.UniformInt(5))});
    }
    std::shuffle(scored.begin(), scored.end(), std::mt19937(trial));
    const ItemId test = scored[rng.UniformInt(n)].item;
    ASSERT_EQ(*RankOfTest(scored, test), OracleRank(scored, test));
  }
}

TEST(HitRatioTest, Boundaries) {
  EXPECT_EQ(HitRatioAtK(10, 10), 1);
  EXPECT_EQ(HitRatioAtK(11, 10), 0);
  for (int k = 1; k < 20; ++k) EXPECT_EQ(HitRatioAtK(1, k), 1);
}

TEST(NdcgTest, Examples) {
  EXPECT_EQ(NdcgAtK(1, 10), 1.0);
  EXPECT_DOUBLE_EQ(NdcgAtK(3, 10), 0.5);
  EXPECT_EQ(NdcgAtK(11, 10), 0.0);
  EXPECT_DOUBLE_EQ(NdcgAtK(10, 10), 1.0 / std::log2(11.0));
}

TEST(NdcgTest, BoundedByHitAndMonotone) {
  for (int k = 1; k <= 20; ++k) {
    for (int rank = 1; rank <= 30; ++rank) {
      ASSERT_LE(NdcgAtK(rank, k), HitRatioAtK(rank, k));
      ASSERT_GE(NdcgAtK(rank, k), NdcgAtK(rank + 1, k));
      ASSERT_GE(HitRatioAtK(rank, k), HitRatioAtK(rank + 1, k));
    }
  }
}

TEST(EvaluateAllTest, PerfectRanker) {
  std::vector<ClientModel> models;
  std::vector<std::vector<ItemId>> candidates;
  for (int u = 0; u < 4; ++u) {
    std::vector<double> scores(20, 0.0);
    scores[u] = 5.0;
    models.push_back(FixedScores(scores));
    std::vector<ItemId> list = {u};
    for (ItemId m = 10; m < 19; ++m) list.push_back(m);
    candidates.push_back(list);
  }
  const RankingMetrics metrics = *EvaluateAll(models, candidates, 10);
  EXPECT_EQ(metrics.hr, 100.0);
  EXPECT_EQ(metrics.ndcg, 100.0);
}

TEST(EvaluateAllTest, SingleUserAtRankThree) {
  const std::vector<ClientModel> models = {FixedScores({0.1, 0.9, 0.8, 0.5})};
  const RankingMetrics metrics = *EvaluateAll(models, {{3, 0, 1, 2}}, 10);
  EXPECT_DOUBLE_EQ(metrics.hr, 100.0);
  EXPECT_DOUBLE_EQ(metrics.ndcg, 50.0);
}

TEST(EvaluateAllTest, SizeMismatchIsError) {
  const std::vector<ClientModel> models = {FixedScores({0.1})};
  EXPECT_FALSE(EvaluateAll(models, {}, 10).ok());
}

TEST(EvaluateAllTest, UserOrderAndWorkersDoNotMatter) {
  Rng rng(8);
  std::vector<ClientModel> models;
  std::vector<std::vector<ItemId>> candidates;
  for (int u = 0; u < 37; ++u) {
    models.push_back(testing::RandomModel({ScoreKind::kDotProduct, {}}, 3, 50,
                                          1.0, rng));
    std::vector<ItemId> list;
    for (ItemId m = 0; m < 50; ++m) list.push_back((m + u) % 50);
    candidates.push_back(list);
  }
  const RankingMetrics serial = *EvaluateAll(models, candidates, 10, 1);
  const RankingMetrics parallel = *EvaluateAll(models, candidates, 10, 4);
  EXPECT_EQ(serial.hr, parallel.hr);
  EXPECT_EQ(serial.ndcg, parallel.ndcg);
  std::reverse(models.begin(), models.end());
  std::reverse(candidates.begin(), candidates.end());
  const RankingMetrics reversed = *EvaluateAll(models, candidates, 10, 1);
  EXPECT_NEAR(serial.hr, reversed.hr, 1e-12);
  EXPECT_NEAR(serial.ndcg, reversed.ndcg, 1e-12);
  EXPECT_LE(serial.ndcg, serial.hr);
}

TEST(EvaluateAllTest, RandomScorerNearTenPercent) {
  Rng rng(2024);
  std::vector<ClientModel> models;
  std::vector<std::vector<ItemId>> candidates;
  for (int u = 0; u < 943; ++u) {
    std::vector<double> scores(100);
    for (double& s : scores) s = rng.Uniform01();
    models.push_back(FixedScores(scores));
    std::vector<ItemId> list;
    for (ItemId m = 0; m < 100; ++m) list.push_back(m);
    candidates.push_back(list);
  }
  const RankingMetrics metrics = *EvaluateAll(models, candidates, 10);
  EXPECT_GE(metrics.hr, 7.0);
  EXPECT_LE(metrics.hr, 13.0);
}

TEST(RankHeldOutTest, UsesFirstCandidate) {
  const ClientModel model = FixedScores({0.3, 0.2, 0.9, 0.1});
  EXPECT_EQ(RankHeldOut(model, std::vector<ItemId>{0, 1, 2, 3}), 2);
  EXPECT_EQ(RankHeldOut(model, std::vector<ItemId>{2, 1, 0, 3}), 1);
  EXPECT_EQ(RankHeldOut(model, std::vector<ItemId>{3, 1, 0, 2}), 4);
}

}  // namespace
}  // namespace fedrec
