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
// Round-based federated simulation. Every client participates in every
// round; one simulated user is one client.
//
// Round t:
//   1. Server update on the uploads of round t-1 (skipped at t = 1, where
//      every client starts from the same initial model and r_i = q_0).
//   2. Client updates, each seeded from (seed, t, client id).
//   3. Evaluation of every client model on its validation and test
//      candidates.
//
// The server only ever sees EmbeddingStack values: item tables, possibly
// noised. Interactions, user embeddings and score functions stay local.

#ifndef FEDREC_FEDSIM_H_
#define FEDREC_FEDSIM_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fedrec/config.h"
#include "fedrec/dataset.h"
#include "fedrec/graph.h"
#include "fedrec/metrics.h"
#include "fedrec/model.h"
#include "fedrec/random.h"

namespace fedrec {

struct ServerOutput {
  EmbeddingStack personalized;  // r_i, one per client
  EmbeddingMatrix global;       // q_global
  UserGraph graph;
  bool graph_rebuilt = false;
};

// graph_agg rebuilds the graph when `cached_graph` is null or
// (round - 1) % graph_update_every == 0, otherwise reuses it. Isolated nodes
// get a self-loop so every threshold yields a usable graph. fed_avg returns
// r_i = q_global = mean upload and the all-ones graph.
absl::StatusOr<ServerOutput> ServerUpdate(const EmbeddingStack& uploads,
                                          const ExperimentConfig& config,
                                          const UserGraph* cached_graph,
                                          int round);

// Resets the item table to `q_global`, then runs local_epochs epochs of
// shuffled mini-batch SGD on BCE + lambda * ||q - r||^2 / (M d), drawing
// fresh negatives each epoch. Writes the (noised when delta > 0) item table
// into `upload` and returns the mean per-sample loss over the steps taken.
// With zero epochs the loss of one sampled batch is reported, untrained.
// A non-finite loss or parameter yields OutOfRange (divergence).
absl::StatusOr<double> ClientUpdate(ClientModel& model,
                                    const EmbeddingMatrix& q_global,
                                    Eigen::Ref<const EmbeddingMatrix> r,
                                    const InteractionDataset& data,
                                    UserId user, const ExperimentConfig& config,
                                    double eta, Rng& rng,
                                    Eigen::Ref<EmbeddingMatrix> upload);

struct FederationState {
  int round = 0;  // rounds completed
  std::vector<ClientModel> models;
  EmbeddingStack uploads;       // from the last completed round
  EmbeddingStack personalized;  // r_i used in the last completed round
  EmbeddingMatrix global;       // q_global used in the last completed round
  std::optional<UserGraph> graph;
};

struct RoundOutcome {
  int round = 0;
  double mean_client_loss = 0.0;  // mean over clients
  int64_t graph_edges = 0;        // 0 when no server update ran
  bool graph_rebuilt = false;
};

class Federation {
 public:
  // Every client starts from one model drawn from the experiment seed, so
  // item tables from different clients share a coordinate system. Clients
  // diverge through their own data from the first round on.
  static absl::StatusOr<Federation> Create(const InteractionDataset& data,
                                           const ExperimentConfig& config,
                                           double eta, int workers);

  // Runs round state().round + 1. A failing client aborts the round and the
  // error names it; the state is then unspecified.
  absl::StatusOr<RoundOutcome> RunRound();

  // Client order in which updates are executed; must be a permutation of
  // [0, N). Results do not depend on it.
  void set_schedule(std::vector<int> schedule) {
    schedule_ = std::move(schedule);
  }

  const FederationState& state() const { return state_; }

 private:
  Federation(const InteractionDataset& data, ExperimentConfig config,
             double eta, int workers)
      : data_(&data), config_(std::move(config)), eta_(eta),
        workers_(workers) {}

  const InteractionDataset* data_;
  ExperimentConfig config_;
  double eta_;
  int workers_;
  std::vector<int> schedule_;
  FederationState state_;
};

struct RoundMetrics {
  int round = 0;
  double eta = 0.0;
  RankingMetrics validation;
  RankingMetrics test;
  double mean_client_loss = 0.0;
  int64_t graph_edges = 0;
  double wall_ms = 0.0;
};

struct EtaRun {
  double eta = 0.0;
  std::vector<RoundMetrics> rounds;  // completed rounds only
  int best_index = 0;                // into `rounds`
  bool diverged = false;             // stopped early on a non-finite update
  std::string error;                 // why it diverged

  const RoundMetrics& best() const { return rounds[best_index]; }
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<EtaRun> runs;  // one per learning rate, grid order
  int best_run = 0;

  const EtaRun& best() const { return runs[best_run]; }
};

struct ExperimentObserver {
  std::function<void(const RoundMetrics&)> on_round;
  std::function<void(int round, const UserGraph&)> on_graph;
};

// Highest validation HR@10, earliest round on ties.
int BestRoundIndex(const std::vector<RoundMetrics>& rounds);

// Runs every learning rate for config.rounds rounds and keeps the one with
// the best validation HR@10 at its best round (earlier grid entry on ties).
// With more than one candidate, a rate whose training diverges is recorded
// and excluded; the experiment fails only if every rate diverges. A single
// rate that diverges is an error.
absl::StatusOr<ExperimentReport> RunExperiment(
    const InteractionDataset& data, const ExperimentConfig& config,
    int workers = 1, const ExperimentObserver& observer = {});

}  // namespace fedrec

#endif  // FEDREC_FEDSIM_H_
