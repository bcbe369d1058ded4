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
// Implicit-feedback interaction data: raw ingestion, canonical dense ids,
// leave-one-out splitting and seeded negative sampling.

#ifndef FEDREC_DATASET_H_
#define FEDREC_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fedrec/random.h"

namespace fedrec {

using UserId = int32_t;
using ItemId = int32_t;

struct Interaction {
  int64_t user = 0;
  int64_t item = 0;
  double rating = 0.0;
  int64_t timestamp = 0;

  bool operator==(const Interaction&) const = default;
};

enum class RawFormat {
  kTabSeparated,  // user \t item \t rating \t timestamp
  kDoubleColon,   // user::item::rating::timestamp
  kCsv,           // header row, then user,item,rating,timestamp
};

absl::StatusOr<RawFormat> ParseRawFormat(std::string_view name);
std::string_view RawFormatName(RawFormat format);

// Parses every record in `in`, preserving order and raw ids. `source` only
// labels error messages.
absl::StatusOr<std::vector<Interaction>> ParseRaw(std::istream& in,
                                                  RawFormat format,
                                                  std::string_view source);
absl::StatusOr<std::vector<Interaction>> LoadRaw(
    const std::filesystem::path& path, RawFormat format);

// Records with dense 0-based ids plus the maps back to raw ids.
struct CanonicalData {
  int32_t n_users = 0;
  int32_t n_items = 0;
  // Dense ids, in original record order.
  std::vector<Interaction> records;
  std::vector<int64_t> raw_user_ids;  // dense -> raw
  std::vector<int64_t> raw_item_ids;  // dense -> raw
};

// Drops duplicate (user, item) pairs keeping the latest timestamp (the later
// record on ties), drops users with fewer than `min_interactions` records,
// and re-indexes the survivors densely in ascending raw-id order.
absl::StatusOr<CanonicalData> Canonicalize(
    const std::vector<Interaction>& records, int min_interactions);

struct TrainingBatch {
  std::vector<ItemId> item_ids;
  std::vector<double> labels;  // 1 for positives, 0 for sampled negatives

  size_t size() const { return item_ids.size(); }
};

// Leave-one-out split. Immutable after construction; safe to share between
// client workers.
class InteractionDataset {
 public:
  int32_t n_users() const { return n_users_; }
  int32_t n_items() const { return n_items_; }

  const std::vector<ItemId>& train(UserId user) const { return train_[user]; }
  ItemId validation(UserId user) const { return validation_[user]; }
  ItemId test(UserId user) const { return test_[user]; }

  // Sorted train + validation + test items of `user`.
  const std::vector<ItemId>& interacted(UserId user) const {
    return interacted_[user];
  }
  bool HasInteracted(UserId user, ItemId item) const;

  const std::vector<int64_t>& raw_user_ids() const { return raw_user_ids_; }
  const std::vector<int64_t>& raw_item_ids() const { return raw_item_ids_; }

  size_t num_interactions() const;

 private:
  friend absl::StatusOr<InteractionDataset> SplitLeaveOneOut(
      const CanonicalData& data);

  int32_t n_users_ = 0;
  int32_t n_items_ = 0;
  std::vector<std::vector<ItemId>> train_;
  std::vector<ItemId> validation_;
  std::vector<ItemId> test_;
  std::vector<std::vector<ItemId>> interacted_;
  std::vector<int64_t> raw_user_ids_;
  std::vector<int64_t> raw_item_ids_;
};

// Latest timestamp goes to test, second latest to validation; timestamp ties
// are broken by record order (the later record counts as later).
absl::StatusOr<InteractionDataset> SplitLeaveOneOut(const CanonicalData& data);

// Every train positive followed by `k_per_positive` distinct negatives drawn
// uniformly from the items `user` never interacted with.
absl::StatusOr<TrainingBatch> SampleNegatives(const InteractionDataset& data,
                                              UserId user, int k_per_positive,
                                              Rng& rng);

enum class EvalTarget { kValidation, kTest };

// The held-out item first, followed by `n_negatives` distinct items the user
// never interacted with.
absl::StatusOr<std::vector<ItemId>> EvalCandidates(
    const InteractionDataset& data, UserId user, EvalTarget target,
    int n_negatives, Rng& rng);

// Candidate lists for every user, each drawn from a stream seeded by
// (seed, target, user) so repeated evaluations see identical lists.
struct CandidateSets {
  std::vector<std::vector<ItemId>> validation;
  std::vector<std::vector<ItemId>> test;
};
absl::StatusOr<CandidateSets> BuildCandidateSets(
    const InteractionDataset& data, int n_negatives, uint64_t seed);

// Canonical dataset.csv: header `user,item,rating,timestamp`, dense ids.
absl::Status WriteCanonicalCsv(const CanonicalData& data, std::ostream& out);
absl::StatusOr<CanonicalData> ReadCanonicalCsv(
    const std::filesystem::path& path);

// Pretty-printed split.json: per-user validation and test ids, plus the seed.
std::string SplitManifestJson(const InteractionDataset& data, uint64_t seed);

}  // namespace fedrec

#endif  // FEDREC_DATASET_H_
