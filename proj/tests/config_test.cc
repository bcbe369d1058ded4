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
#include "fedrec/config.h"

#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace fedrec {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::string Message(const absl::Status& status) {
  return std::string(status.message());
}

TEST(ConfigTest, DefaultsValidate) {
  const ExperimentConfig config;
  EXPECT_TRUE(config.Validate().ok());
  EXPECT_THAT(config.EtaCandidates(), ElementsAre(config.eta));
  EXPECT_EQ(config.ScoreSpec().kind, ScoreKind::kMlp);
  EXPECT_THAT(config.ScoreSpec().hidden_sizes, ElementsAre(32, 16, 8));
}

TEST(ConfigTest, ApplySettingAcceptsBothSpellingsAndAlias) {
  RunConfig config;
  ASSERT_TRUE(ApplySetting(config, "local-epochs", "3").ok());
  ASSERT_TRUE(ApplySetting(config, "graph_update_every", "5").ok());
  ASSERT_TRUE(ApplySetting(config, "d", "16").ok());
  ASSERT_TRUE(ApplySetting(config, "eta-grid", "0.001, 0.01").ok());
  ASSERT_TRUE(ApplySetting(config, "hidden_sizes", "8,4").ok());
  ASSERT_TRUE(ApplySetting(config, "aggregation", "fed_avg").ok());
  ASSERT_TRUE(ApplySetting(config, "backbone", "mf").ok());
  ASSERT_TRUE(ApplySetting(config, "timing", "no").ok());
  ASSERT_TRUE(ApplySetting(config, "workers", "4").ok());
  const ExperimentConfig& e = config.experiment;
  EXPECT_EQ(e.local_epochs, 3);
  EXPECT_EQ(e.graph_update_every, 5);
  EXPECT_EQ(e.dim, 16);
  EXPECT_THAT(e.EtaCandidates(), ElementsAre(0.001, 0.01));
  EXPECT_THAT(e.hidden_sizes, ElementsAre(8, 4));
  EXPECT_EQ(e.aggregation, AggregationKind::kFedAvg);
  EXPECT_EQ(e.ScoreSpec().kind, ScoreKind::kDotProduct);
  EXPECT_FALSE(e.record_timing);
  EXPECT_EQ(config.workers, 4);
}

TEST(ConfigTest, UnknownKeyListsValidKeys) {
  RunConfig config;
  const absl::Status status = ApplySetting(config, "gama", "1");
  ASSERT_FALSE(status.ok());
  EXPECT_THAT(Message(status), HasSubstr("gama"));
  EXPECT_THAT(Message(status), HasSubstr("gamma"));
}

TEST(ConfigTest, BadValuesAreErrors) {
  RunConfig config;
  EXPECT_FALSE(ApplySetting(config, "rounds", "ten").ok());
  EXPECT_FALSE(ApplySetting(config, "rounds", "10x").ok());
  EXPECT_FALSE(ApplySetting(config, "lambda", "").ok());
  EXPECT_FALSE(ApplySetting(config, "timing", "maybe").ok());
  EXPECT_FALSE(ApplySetting(config, "aggregation", "median").ok());
  EXPECT_FALSE(ApplySetting(config, "normalization", "sym").ok());
  EXPECT_FALSE(ApplySetting(config, "workers", "0").ok());
  EXPECT_FALSE(ApplySetting(config, "eta_grid", "0.1,,x").ok());
}

TEST(ConfigTest, ValidateRejectsOutOfRange) {
  auto invalid = [](auto mutate) {
    ExperimentConfig config;
    mutate(config);
    return !config.Validate().ok();
  };
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.lambda = -1; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.gamma = -0.1; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.delta = -0.1; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.eta = 0; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.eta_grid = {0.1, -1}; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.item_lr_scale = 0; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.dim = 0; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.rounds = 0; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.conv_layers = 0; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.graph_update_every = 0; }));
  EXPECT_TRUE(invalid([](ExperimentConfig& c) { c.hidden_sizes = {4, 0}; }));
  EXPECT_FALSE(invalid([](ExperimentConfig& c) { c.local_epochs = 0; }));
  EXPECT_FALSE(invalid([](ExperimentConfig& c) { c.gamma = 0; }));
}

TEST(ConfigTextTest, CommentsBlankLinesAndErrorsWithLine) {
  RunConfig config;
  ASSERT_TRUE(ApplyConfigText(config,
                              "# comment\n\ngamma = 1.5\n  rounds=7  \n", "x.cfg")
                  .ok());
  EXPECT_EQ(config.experiment.gamma, 1.5);
  EXPECT_EQ(config.experiment.rounds, 7);
  const absl::Status missing_eq = ApplyConfigText(config, "gamma 1\n", "x.cfg");
  EXPECT_THAT(Message(missing_eq), HasSubstr("x.cfg:1"));
  const absl::Status bad = ApplyConfigText(config, "seed = 1\nbogus = 2\n", "x.cfg");
  EXPECT_THAT(Message(bad), HasSubstr("x.cfg:2"));
}

TEST(ConfigTextTest, MissingFileIsError) {
  RunConfig config;
  EXPECT_FALSE(ApplyConfigFile(config, "/nonexistent/run.cfg").ok());
}

TEST(ConfigTextTest, RenderingRoundTrips) {
  RunConfig config;
  ASSERT_TRUE(ApplyConfigText(config,
                              "lambda = 0.25\neta_grid = 0.0001,0.1\n"
                              "backbone = mf\nnormalization = vanilla\n"
                              "seed = 7\ndump_graph = true\nout = /tmp/x\n"
                              "item_lr_scale = 12.5\n",
                              "a")
                  .ok());
  const std::string text = ConfigToText(config);
  RunConfig back;
  ASSERT_TRUE(ApplyConfigText(back, text, "b").ok()) << text;
  EXPECT_EQ(ConfigToText(back), text);
  EXPECT_EQ(back.experiment.lambda, 0.25);
  EXPECT_EQ(back.experiment.item_lr_scale, 12.5);
  EXPECT_EQ(back.experiment.normalization, Normalization::kVanilla);
  EXPECT_TRUE(back.dump_graph);
  for (const std::string& key : ConfigKeys()) {
    EXPECT_THAT(text, HasSubstr(key + " = ")) << key;
  }
}

TEST(ConfigTest, EnumNamesRoundTrip) {
  for (AggregationKind k : {AggregationKind::kGraphAgg, AggregationKind::kFedAvg}) {
    EXPECT_EQ(*ParseAggregation(AggregationName(k)), k);
  }
  for (Backbone b : {Backbone::kNcf, Backbone::kMf}) {
    EXPECT_EQ(*ParseBackbone(BackboneName(b)), b);
  }
  EXPECT_FALSE(ParseBackbone("gnn").ok());
}

}  // namespace
}  // namespace fedrec
