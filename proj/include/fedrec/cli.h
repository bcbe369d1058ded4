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
// Command-line front end: `prepare`, `train` and `sweep`.

#ifndef FEDREC_CLI_H_
#define FEDREC_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fedrec/config.h"
#include "fedrec/dataset.h"

namespace fedrec {

// Parameters `sweep` accepts.
const std::vector<std::string>& SweepParameters();

// Reads dataset.csv and splits it. When a split.json sits next to it, its
// held-out items must agree with the recomputed split.
absl::StatusOr<InteractionDataset> LoadPreparedDataset(const std::string& path);

// Returns the process exit code. `out` gets results, `err` progress and
// errors.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace fedrec

#endif  // FEDREC_CLI_H_
