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
#include "fedrec/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "str_util.h"
#include "json.hpp"

namespace fedrec {
namespace {

bool ParseInt(std::string_view s, int64_t& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseReal(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Timestamps are integers, but some exports write them as "881250949.0".
bool ParseTimestamp(std::string_view s, int64_t& out) {
  if (ParseInt(s, out)) return true;
  double real = 0.0;
  if (!ParseReal(s, real) || real != std::floor(real)) return false;
  out = static_cast<int64_t>(real);
  return true;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line,
                                          RawFormat format) {
  switch (format) {
    case RawFormat::kTabSeparated:
      return StrSplit(line, "\t");
    case RawFormat::kDoubleColon:
      return StrSplit(line, "::");
    case RawFormat::kCsv:
      return StrSplit(line, ",");
  }
  return {};
}

// Appends `count` distinct items that are not in `excluded` (sorted) to
// `out`. Items already in `out` before the call may be drawn again.
absl::Status DrawDistinctUnseen(int32_t n_items,
                                const std::vector<ItemId>& excluded,
                                int count, Rng& rng,
                                std::vector<ItemId>& out) {
  const int64_t available =
      static_cast<int64_t>(n_items) - static_cast<int64_t>(excluded.size());
  if (count > available) {
    return absl::FailedPreconditionError(
        StrCat("need ", count, " unseen items but only ", available,
                     " exist"));
  }
  if (count == 0) return absl::OkStatus();

  const size_t start = out.size();
  auto already_drawn = [&](ItemId item) {
    return std::find(out.begin() + start, out.end(), item) != out.end();
  };
  if (2 * available >= n_items && 2 * count <= available) {
    while (static_cast<int>(out.size() - start) < count) {
      const auto item = static_cast<ItemId>(rng.UniformInt(n_items));
      if (std::binary_search(excluded.begin(), excluded.end(), item)) continue;
      if (already_drawn(item)) continue;
      out.push_back(item);
    }
    return absl::OkStatus();
  }
  // Sparse complement: enumerate it and take a partial Fisher-Yates prefix.
  std::vector<ItemId> pool;
  pool.reserve(available);
  for (ItemId item = 0; item < n_items; ++item) {
    if (!std::binary_search(excluded.begin(), excluded.end(), item)) {
      pool.push_back(item);
    }
  }
  for (int i = 0; i < count; ++i) {
    const size_t j = i + rng.UniformInt(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<RawFormat> ParseRawFormat(std::string_view name) {
  if (name == "tab" || name == "tab_separated" || name == "tsv") {
    return RawFormat::kTabSeparated;
  }
  if (name == "double_colon" || name == "dat") return RawFormat::kDoubleColon;
  if (name == "csv") return RawFormat::kCsv;
  return absl::InvalidArgumentError(
      StrCat("unknown format '", name,
                   "' (expected tab_separated, double_colon or csv)"));
}

std::string_view RawFormatName(RawFormat format) {
  switch (format) {
    case RawFormat::kTabSeparated:
      return "tab_separated";
    case RawFormat::kDoubleColon:
      return "double_colon";
    case RawFormat::kCsv:
      return "csv";
  }
  return "unknown";
}

absl::StatusOr<std::vector<Interaction>> ParseRaw(std::istream& in,
                                                  RawFormat format,
                                                  std::string_view source) {
  std::vector<Interaction> records;
  std::string line;
  int64_t line_no = 0;
  bool header_pending = format == RawFormat::kCsv;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const std::vector<std::string_view> fields = SplitFields(trimmed, format);
    Interaction record;
    if (fields.size() != 4 || !ParseInt(Trim(fields[0]), record.user) ||
        !ParseInt(Trim(fields[1]), record.item) ||
        !ParseReal(Trim(fields[2]), record.rating) ||
        !ParseTimestamp(Trim(fields[3]), record.timestamp)) {
      return absl::InvalidArgumentError(
          StrCat(source, ":", line_no, ": malformed ",
                       RawFormatName(format), " record '", trimmed, "'"));
    }
    records.push_back(record);
  }
  if (records.empty()) {
    return absl::InvalidArgumentError(StrCat(source, ": no records"));
  }
  return records;
}

absl::StatusOr<std::vector<Interaction>> LoadRaw(
    const std::filesystem::path& path, RawFormat format) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        StrCat("cannot open '", path.string(), "'"));
  }
  return ParseRaw(in, format, path.string());
}

absl::StatusOr<CanonicalData> Canonicalize(
    const std::vector<Interaction>& records, int min_interactions) {
  if (records.empty()) return absl::InvalidArgumentError("no records");

  // Latest record index per (user, item).
  std::map<std::pair<int64_t, int64_t>, size_t> latest;
  for (size_t i = 0; i < records.size(); ++i) {
    const auto key = std::make_pair(records[i].user, records[i].item);
    auto [it, inserted] = latest.emplace(key, i);
    if (!inserted && records[i].timestamp >= records[it->second].timestamp) {
      it->second = i;
    }
  }
  std::vector<size_t> kept;
  kept.reserve(latest.size());
  for (const auto& [key, index] : latest) kept.push_back(index);
  std::sort(kept.begin(), kept.end());

  std::map<int64_t, int64_t> user_counts;
  for (size_t index : kept) ++user_counts[records[index].user];

  std::map<int64_t, int32_t> user_ids;
  std::map<int64_t, int32_t> item_ids;
  for (const auto& [user, count] : user_counts) {
    if (count >= min_interactions) user_ids.emplace(user, 0);
  }
  if (user_ids.empty()) {
    return absl::FailedPreconditionError(StrCat(
        "every user has fewer than ", min_interactions, " interactions"));
  }
  for (size_t index : kept) {
    if (user_ids.contains(records[index].user)) {
      item_ids.emplace(records[index].item, 0);
    }
  }

  CanonicalData out;
  for (auto& [raw, dense] : user_ids) {
    dense = static_cast<int32_t>(out.raw_user_ids.size());
    out.raw_user_ids.push_back(raw);
  }
  for (auto& [raw, dense] : item_ids) {
    dense = static_cast<int32_t>(out.raw_item_ids.size());
    out.raw_item_ids.push_back(raw);
  }
  out.n_users = static_cast<int32_t>(out.raw_user_ids.size());
  out.n_items = static_cast<int32_t>(out.raw_item_ids.size());
  for (size_t index : kept) {
    const Interaction& r = records[index];
    auto user = user_ids.find(r.user);
    if (user == user_ids.end()) continue;
    out.records.push_back(
        {user->second, item_ids.at(r.item), r.rating, r.timestamp});
  }
  return out;
}

bool InteractionDataset::HasInteracted(UserId user, ItemId item) const {
  const auto& items = interacted_[user];
  return std::binary_search(items.begin(), items.end(), item);
}

size_t InteractionDataset::num_interactions() const {
  size_t total = 0;
  for (const auto& items : interacted_) total += items.size();
  return total;
}

absl::StatusOr<InteractionDataset> SplitLeaveOneOut(const CanonicalData& data) {
  // Per-user record indices; record order is the tie-break.
  std::vector<std::vector<size_t>> by_user(data.n_users);
  for (size_t i = 0; i < data.records.size(); ++i) {
    by_user[data.records[i].user].push_back(i);
  }

  InteractionDataset out;
  out.n_users_ = data.n_users;
  out.n_items_ = data.n_items;
  out.train_.resize(data.n_users);
  out.validation_.resize(data.n_users);
  out.test_.resize(data.n_users);
  out.interacted_.resize(data.n_users);
  out.raw_user_ids_ = data.raw_user_ids;
  out.raw_item_ids_ = data.raw_item_ids;

  for (UserId user = 0; user < data.n_users; ++user) {
    std::vector<size_t>& indices = by_user[user];
    if (indices.size() < 3) {
      return absl::FailedPreconditionError(StrCat(
          "user ", user, " (raw id ", data.raw_user_ids[user], ") has ",
          indices.size(), " interactions; leave-one-out needs at least 3"));
    }
    std::stable_sort(indices.begin(), indices.end(), [&](size_t a, size_t b) {
      return data.records[a].timestamp < data.records[b].timestamp;
    });
    out.test_[user] = static_cast<ItemId>(data.records[indices.back()].item);
    out.validation_[user] =
        static_cast<ItemId>(data.records[indices[indices.size() - 2]].item);
    auto& train = out.train_[user];
    for (size_t k = 0; k + 2 < indices.size(); ++k) {
      train.push_back(static_cast<ItemId>(data.records[indices[k]].item));
    }
    auto& seen = out.interacted_[user];
    seen = train;
    seen.push_back(out.validation_[user]);
    seen.push_back(out.test_[user]);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      return absl::InvalidArgumentError(StrCat(
          "user ", user, " has duplicate items; canonicalize first"));
    }
  }
  return out;
}

absl::StatusOr<TrainingBatch> SampleNegatives(const InteractionDataset& data,
                                              UserId user, int k_per_positive,
                                              Rng& rng) {
  if (user < 0 || user >= data.n_users()) {
    return absl::OutOfRangeError(StrCat("user ", user, " out of range"));
  }
  if (k_per_positive < 0) {
    return absl::InvalidArgumentError("k_per_positive must be >= 0");
  }
  const auto& positives = data.train(user);
  if (positives.empty()) {
    return absl::FailedPreconditionError(
        StrCat("user ", user, " has no train positives"));
  }
  TrainingBatch batch;
  const size_t total = positives.size() * (1 + k_per_positive);
  batch.item_ids.reserve(total);
  batch.labels.reserve(total);
  for (ItemId positive : positives) {
    batch.item_ids.push_back(positive);
    batch.labels.push_back(1.0);
    const absl::Status drawn = DrawDistinctUnseen(
        data.n_items(), data.interacted(user), k_per_positive, rng,
        batch.item_ids);
    if (!drawn.ok()) {
      return absl::FailedPreconditionError(
          StrCat("user ", user, ": ", drawn.message()));
    }
    batch.labels.resize(batch.item_ids.size(), 0.0);
  }
  return batch;
}

absl::StatusOr<std::vector<ItemId>> EvalCandidates(
    const InteractionDataset& data, UserId user, EvalTarget target,
    int n_negatives, Rng& rng) {
  if (user < 0 || user >= data.n_users()) {
    return absl::OutOfRangeError(StrCat("user ", user, " out of range"));
  }
  if (n_negatives < 0) {
    return absl::InvalidArgumentError("n_negatives must be >= 0");
  }
  std::vector<ItemId> candidates;
  candidates.reserve(n_negatives + 1);
  candidates.push_back(target == EvalTarget::kTest ? data.test(user)
                                                   : data.validation(user));
  const absl::Status drawn = DrawDistinctUnseen(
      data.n_items(), data.interacted(user), n_negatives, rng, candidates);
  if (!drawn.ok()) {
    return absl::FailedPreconditionError(
        StrCat("user ", user, ": ", drawn.message()));
  }
  return candidates;
}

absl::StatusOr<CandidateSets> BuildCandidateSets(
    const InteractionDataset& data, int n_negatives, uint64_t seed) {
  CandidateSets sets;
  sets.validation.resize(data.n_users());
  sets.test.resize(data.n_users());
  for (UserId user = 0; user < data.n_users(); ++user) {
    Rng val_rng(DeriveSeed(seed, {0xE7A1, 0, static_cast<uint64_t>(user)}));
    auto val = EvalCandidates(data, user, EvalTarget::kValidation, n_negatives,
                              val_rng);
    if (!val.ok()) return val.status();
    sets.validation[user] = *std::move(val);

    Rng test_rng(DeriveSeed(seed, {0xE7A1, 1, static_cast<uint64_t>(user)}));
    auto test =
        EvalCandidates(data, user, EvalTarget::kTest, n_negatives, test_rng);
    if (!test.ok()) return test.status();
    sets.test[user] = *std::move(test);
  }
  return sets;
}

absl::Status WriteCanonicalCsv(const CanonicalData& data, std::ostream& out) {
  out << "user,item,rating,timestamp\n";
  for (const Interaction& r : data.records) {
    char rating[32];
    const auto res = std::to_chars(rating, rating + sizeof(rating), r.rating);
    out << r.user << ',' << r.item << ','
        << std::string_view(rating, res.ptr - rating) << ',' << r.timestamp
        << '\n';
  }
  if (!out) return absl::InternalError("failed writing canonical csv");
  return absl::OkStatus();
}

absl::StatusOr<CanonicalData> ReadCanonicalCsv(
    const std::filesystem::path& path) {
  auto records = LoadRaw(path, RawFormat::kCsv);
  if (!records.ok()) return records.status();
  auto data = Canonicalize(*records, 0);
  if (!data.ok()) return data.status();
  // Canonical files are already dense; anything else was not produced by
  // `prepare`.
  for (size_t i = 0; i < data->raw_user_ids.size(); ++i) {
    if (data->raw_user_ids[i] != static_cast<int64_t>(i)) {
      return absl::InvalidArgumentError(StrCat(
          path.string(), ": user ids are not dense 0-based; run prepare"));
    }
  }
  for (size_t i = 0; i < data->raw_item_ids.size(); ++i) {
    if (data->raw_item_ids[i] != static_cast<int64_t>(i)) {
      return absl::InvalidArgumentError(StrCat(
          path.string(), ": item ids are not dense 0-based; run prepare"));
    }
  }
  if (data->records.size() != records->size()) {
    return absl::InvalidArgumentError(
        StrCat(path.string(), ": duplicate (user, item) records"));
  }
  return data;
}

std::string SplitManifestJson(const InteractionDataset& data, uint64_t seed) {
  nlohmann::ordered_json users = nlohmann::ordered_json::array();
  for (UserId user = 0; user < data.n_users(); ++user) {
    users.push_back({{"user", user},
                     {"validation", data.validation(user)},
                     {"test", data.test(user)}});
  }
  nlohmann::ordered_json manifest = {
      {"format", "fedrec-split/1"},
      {"seed", seed},
      {"n_users", data.n_users()},
      {"n_items", data.n_items()},
      {"users", std::move(users)},
  };
  return manifest.dump(2) + "\n";
}

}  // namespace fedrec
