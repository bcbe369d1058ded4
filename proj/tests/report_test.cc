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
#include "fedrec/report.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace fedrec {
namespace {

using ::testing::HasSubstr;

RoundMetrics Round(int round, double eta, double val_hr, double test_hr) {
  RoundMetrics m;
  m.round = round;
  m.eta = eta;
  m.validation = {val_hr, val_hr / 2};
  m.test = {test_hr, test_hr / 2};
  m.mean_client_loss = 0.5 / round;
  m.graph_edges = round == 1 ? 0 : 9;
  m.wall_ms = 12.34;
  return m;
}

ExperimentReport TwoRateReport() {
  ExperimentReport report;
  EtaRun slow;
  slow.eta = 0.001;
  slow.rounds = {Round(1, 0.001, 10, 11), Round(2, 0.001, 20.123456, 19)};
  slow.best_index = 1;
  EtaRun fast;
  fast.eta = 0.1;
  fast.rounds = {Round(1, 0.1, 5, 6)};
  fast.diverged = true;
  fast.error = "round 2 client 0: loss is not finite";
  report.runs = {slow, fast};
  report.best_run = 0;
  return report;
}

TEST(MetricsCsvTest, HeaderAndFourDecimals) {
  const std::string csv = MetricsCsv(TwoRateReport());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "round,eta,val_hr10,val_ndcg10,test_hr10,test_ndcg10,"
            "mean_client_loss,graph_edges,wall_ms");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0.001,10.0000,5.0000,11.0000,5.5000,0.500000,0,12.3");
  std::getline(in, line);
  EXPECT_THAT(line, HasSubstr(",20.1235,10.0617,"));
  std::getline(in, line);
  EXPECT_EQ(line.rfind("1,0.1,", 0), 0u);
  EXPECT_FALSE(std::getline(in, line));
}

TEST(ReportJsonTest, EchoesConfigAndSelection) {
  RunConfig run;
  run.experiment.aggregation = AggregationKind::kFedAvg;
  run.experiment.delta = 0.3;
  run.experiment.eta_grid = {0.001, 0.1};
  run.data_path = "data/dataset.csv";
  ExperimentReport report = TwoRateReport();
  report.config = run.experiment;
  const auto doc = nlohmann::json::parse(ReportJson(report, run));
  EXPECT_EQ(doc["seed"], 42);
  EXPECT_EQ(doc["config"]["aggregation"], "fed_avg");
  EXPECT_EQ(doc["config"]["delta"], 0.3);
  EXPECT_EQ(doc["config"]["data"], "data/dataset.csv");
  EXPECT_EQ(doc["selected_eta"], 0.001);
  EXPECT_EQ(doc["best_round"], 2);
  EXPECT_EQ(doc["test"]["hr10"], 19.0);
  EXPECT_EQ(doc["validation"]["hr10"], 20.1235);
  ASSERT_EQ(doc["eta_runs"].size(), 2u);
  EXPECT_EQ(doc["eta_runs"][1]["diverged"], true);
}

// Every config key must be echoed so a report is enough to rerun.
TEST(ReportJsonTest, ConfigEchoCoversEveryKey) {
  RunConfig run;
  const auto doc = nlohmann::json::parse(ReportJson(TwoRateReport(), run));
  for (const std::string& key : ConfigKeys()) {
    EXPECT_TRUE(doc["config"].contains(key)) << key;
  }
}

TEST(SweepSummaryTest, OneRowPerRun) {
  const ExperimentReport report = TwoRateReport();
  const std::vector<SweepRow> rows = {SummarizeRun("gamma", "0.5", report),
                                      SummarizeRun("gamma", "1.0", report)};
  EXPECT_EQ(rows[0].best_round, 2);
  EXPECT_EQ(rows[0].eta, 0.001);
  const std::string csv = SweepSummaryCsv(rows);
  std::istringstream in(csv);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3);
  EXPECT_THAT(csv, HasSubstr("gamma,1.0,"));
}

TEST(WriteTextFileTest, CreatesParents) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("fedrec_report_test_" + std::to_string(::getpid()));
  const auto path = dir / "a" / "b.txt";
  ASSERT_TRUE(WriteTextFile(path, "hello\n").ok());
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(content, "hello\n");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fedrec
