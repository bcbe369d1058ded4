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
#ifndef FEDREC_TESTS_TESTING_SYNTHETIC_H_
#define FEDREC_TESTS_TESTING_SYNTHETIC_H_

#include <cstdint>

#include "fedrec/dataset.h"

namespace fedrec::testing {

// Users fall into two taste groups; each draws most of its `per_user`
// distinct items from its group's half of the catalogue. Timestamps
// increase with record order. Dense ids, so raw id == dense id.
CanonicalData SyntheticData(int n_users, int n_items, int per_user,
                            uint64_t seed);

InteractionDataset SyntheticDataset(int n_users, int n_items, int per_user,
                                    uint64_t seed);

}  // namespace fedrec::testing

#endif  // FEDREC_TESTS_TESTING_SYNTHETIC_H_
