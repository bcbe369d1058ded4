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
// Result files. Metrics are in 1e-2 units with four decimals.

#ifndef FEDREC_REPORT_H_
#define FEDREC_REPORT_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "fedrec/config.h"
#include "fedrec/fedsim.h"

namespace fedrec {

// Header `round,eta,val_hr10,val_ndcg10,test_hr10,test_ndcg10,
// mean_client_loss,graph_edges,wall_ms`, then every round of every learning
// rate in run order.
std::string MetricsCsv(const ExperimentReport& report);

// Pretty JSON: the full effective config, seed, selected learning rate, best
// round with its validation and test metrics, and a per-rate summary.
std::string ReportJson(const ExperimentReport& report, const RunConfig& run);

struct SweepRow {
  std::string parameter;
  std::string value;
  double eta = 0.0;
  int best_round = 0;
  RankingMetrics validation;
  RankingMetrics test;
};

SweepRow SummarizeRun(std::string_view parameter, std::string_view value,
                      const ExperimentReport& report);

std::string SweepSummaryCsv(const std::vector<SweepRow>& rows);

// Creates parent directories as needed.
absl::Status WriteTextFile(const std::filesystem::path& path,
                           std::string_view content);

}  // namespace fedrec

#endif  // FEDREC_REPORT_H_
