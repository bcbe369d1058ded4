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

#include <cmath>

#include "str_util.h"
#include "fedrec/parallel.h"

namespace fedrec {
namespace {

// Strict "ranks ahead of" under descending score, ascending id.
bool Precedes(const ScoredItem& a, const ScoredItem& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.item < b.item;
}

}  // namespace

absl::StatusOr<int> RankOfTest(std::span<const ScoredItem> scored,
                               ItemId test_item) {
  const ScoredItem* test = nullptr;
  for (const ScoredItem& s : scored) {
    if (s.item == test_item) {
      test = &s;
      break;
    }
  }
  if (test == nullptr) {
    return absl::NotFoundError(
        StrCat("test item ", test_item, " is not among the candidates"));
  }
  int rank = 1;
  for (const ScoredItem& s : scored) {
    if (&s != test && Precedes(s, *test)) ++rank;
  }
  return rank;
}

int HitRatioAtK(int rank, int k) { return rank <= k ? 1 : 0; }

double NdcgAtK(int rank, int k) {
  return rank <= k ? 1.0 / std::log2(rank + 1.0) : 0.0;
}

int RankHeldOut(const ClientModel& model, std::span<const ItemId> candidates) {
  const Eigen::VectorXd scores = PredictMany(model, candidates);
  const ScoredItem held_out{candidates[0], scores(0)};
  int rank = 1;
  for (size_t c = 1; c < candidates.size(); ++c) {
    if (Precedes({candidates[c], scores(static_cast<Eigen::Index>(c))},
                 held_out)) {
      ++rank;
    }
  }
  return rank;
}

absl::StatusOr<RankingMetrics> EvaluateAll(
    std::span<const ClientModel> models,
    const std::vector<std::vector<ItemId>>& candidates, int k, int workers) {
  if (models.size() != candidates.size()) {
    return absl::InvalidArgumentError(
        StrCat(models.size(), " models for ", candidates.size(),
                     " candidate lists"));
  }
  if (models.empty()) return absl::InvalidArgumentError("no users");
  if (k < 1) return absl::InvalidArgumentError("K must be >= 1");
  for (size_t u = 0; u < models.size(); ++u) {
    if (candidates[u].empty()) {
      return absl::InvalidArgumentError(
          StrCat("user ", u, " has no candidates"));
    }
    for (ItemId item : candidates[u]) {
      if (item < 0 || item >= models[u].num_items()) {
        return absl::OutOfRangeError(
            StrCat("user ", u, ": candidate ", item, " out of range"));
      }
    }
  }
  std::vector<int> ranks(models.size());
  ParallelFor(static_cast<int>(models.size()), workers, [&](int u) {
    ranks[u] = RankHeldOut(models[u], candidates[u]);
  });
  RankingMetrics metrics;
  for (int rank : ranks) {
    metrics.hr += HitRatioAtK(rank, k);
    metrics.ndcg += NdcgAtK(rank, k);
  }
  const double scale = 100.0 / static_cast<double>(ranks.size());
  metrics.hr *= scale;
  metrics.ndcg *= scale;
  return metrics;
}

}  // namespace fedrec
