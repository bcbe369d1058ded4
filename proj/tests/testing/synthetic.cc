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
#include "testing/synthetic.h"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <vector>

#include "fedrec/random.h"

namespace fedrec::testing {

CanonicalData SyntheticData(int n_users, int n_items, int per_user,
                            uint64_t seed) {
  Rng rng(seed);
  CanonicalData data;
  data.n_users = n_users;
  data.n_items = n_items;
  for (int u = 0; u < n_users; ++u) data.raw_user_ids.push_back(u);
  for (int m = 0; m < n_items; ++m) data.raw_item_ids.push_back(m);
  const int half = n_items / 2;
  int64_t timestamp = 1000;
  for (int u = 0; u < n_users; ++u) {
    const int offset = (u % 2) * half;
    std::vector<ItemId> chosen;
    while (static_cast<int>(chosen.size()) < per_user) {
      ItemId item;
      if (rng.Uniform01() < 0.8) {
        item = offset + static_cast<ItemId>(rng.UniformInt(half));
      } else {
        item = static_cast<ItemId>(rng.UniformInt(n_items));
      }
      if (std::find(chosen.begin(), chosen.end(), item) != chosen.end()) {
        continue;
      }
      chosen.push_back(item);
      data.records.push_back({u, item, 5.0, timestamp++});
    }
  }
  return data;
}

InteractionDataset SyntheticDataset(int n_users, int n_items, int per_user,
                                    uint64_t seed) {
  auto split = SplitLeaveOneOut(SyntheticData(n_users, n_items, per_user, seed));
  if (!split.ok()) {
    std::cerr << "synthetic split failed: " << split.status() << "\n";
    std::abort();
  }
  return *std::move(split);
}

}  // namespace fedrec::testing
