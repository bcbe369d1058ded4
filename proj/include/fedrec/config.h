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
// Experiment configuration and its flat `key = value` file format. Lines
// starting with '#' are comments; unknown keys are rejected.
//
//   key                     default          meaning
//   lambda                  0.5              regularization coefficient
//   gamma                   0.5              adjacency threshold scale
//   eta                     0.001            SGD learning rate
//   item_lr_scale           10000            multiplier on item-embedding steps
//   eta_grid                (eta)            comma list; >1 entry = search
//   delta                   0                Laplace scale on uploads
//   dim                     32               embedding size (alias: d)
//   local_epochs            1                client epochs per round (E)
//   rounds                  100              communication rounds (T)
//   conv_layers             1                propagation layers (l)
//   batch_size              256
//   negatives_per_positive  4
//   eval_negatives          99
//   top_k                   10
//   aggregation             graph_agg        graph_agg | fed_avg
//   backbone                ncf              ncf (MLP) | mf (dot product)
//   hidden_sizes            32,16,8          MLP hidden widths (ncf only)
//   normalization           row_normalized   row_normalized | vanilla
//   graph_update_every      1                rebuild cadence; >1 = Light
//   seed                    42
//   timing                  true             false writes wall_ms as 0
//   data                    -                prepared dataset.csv
//   out                     $GPFEDREC_OUT_DIR or ./out
//   workers                 1                parallel client workers
//   dump_graph              false            write graph_round_<t>.json
//
// The row-normalized default averages over neighbours rather than summing,
// which keeps the regularization target on the same scale as the uploads.

#ifndef FEDREC_CONFIG_H_
#define FEDREC_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fedrec/graph.h"
#include "fedrec/model.h"

namespace fedrec {

enum class AggregationKind { kGraphAgg, kFedAvg };
enum class Backbone { kNcf, kMf };

absl::StatusOr<AggregationKind> ParseAggregation(std::string_view name);
std::string_view AggregationName(AggregationKind kind);
absl::StatusOr<Backbone> ParseBackbone(std::string_view name);
std::string_view BackboneName(Backbone backbone);

struct ExperimentConfig {
  double lambda = 0.5;
  double gamma = 0.5;
  double eta = 0.001;
  double item_lr_scale = 10000.0;
  std::vector<double> eta_grid;  // empty means {eta}
  double delta = 0.0;
  int dim = 32;
  int local_epochs = 1;
  int rounds = 100;
  int conv_layers = 1;
  int batch_size = 256;
  int negatives_per_positive = 4;
  int eval_negatives = 99;
  int top_k = 10;
  AggregationKind aggregation = AggregationKind::kGraphAgg;
  Backbone backbone = Backbone::kNcf;
  std::vector<int> hidden_sizes = {32, 16, 8};
  Normalization normalization = Normalization::kRowNormalized;
  int graph_update_every = 1;
  uint64_t seed = 42;
  bool record_timing = true;

  // Learning rates to try, in order.
  std::vector<double> EtaCandidates() const;
  ScoreFunctionSpec ScoreSpec() const;
  absl::Status Validate() const;
};

// Everything the `train` and `sweep` commands need.
struct RunConfig {
  ExperimentConfig experiment;
  std::string data_path;
  std::string out_dir;
  int workers = 1;
  bool dump_graph = false;
};

// Applies one setting. Keys are the snake_case names above; kebab-case is
// accepted too so flags and file keys share one table.
absl::Status ApplySetting(RunConfig& config, std::string_view key,
                          std::string_view value);

// Every key ApplySetting understands, canonical spelling.
const std::vector<std::string>& ConfigKeys();

absl::Status ApplyConfigText(RunConfig& config, std::string_view text,
                             std::string_view source);
absl::Status ApplyConfigFile(RunConfig& config,
                             const std::filesystem::path& path);

// Canonical `key = value` rendering of every setting.
std::string ConfigToText(const RunConfig& config);

}  // namespace fedrec

#endif  // FEDREC_CONFIG_H_
