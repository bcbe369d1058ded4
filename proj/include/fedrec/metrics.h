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
#ifndef FEDREC_METRICS_H_
#define FEDREC_METRICS_H_

#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "fedrec/dataset.h"
#include "fedrec/model.h"

namespace fedrec {

struct ScoredItem {
  ItemId item = 0;
  double score = 0.0;
};

// 1-based position of `test_item` when `scored` is ordered by descending
// score, ascending item id on ties.
absl::StatusOr<int> RankOfTest(std::span<const ScoredItem> scored,
                               ItemId test_item);

int HitRatioAtK(int rank, int k);
double NdcgAtK(int rank, int k);

// Means over users, in units of 1e-2 (a perfect ranker scores 100).
struct RankingMetrics {
  double hr = 0.0;
  double ndcg = 0.0;
};

// Scores each user's candidate list (held-out item first) with that user's
// model. Users are reduced in id order regardless of `workers`.
absl::StatusOr<RankingMetrics> EvaluateAll(
    std::span<const ClientModel> models,
    const std::vector<std::vector<ItemId>>& candidates, int k,
    int workers = 1);

// Rank of the held-out item (first candidate) under `model`.
int RankHeldOut(const ClientModel& model, std::span<const ItemId> candidates);

}  // namespace fedrec

#endif  // FEDREC_METRICS_H_
