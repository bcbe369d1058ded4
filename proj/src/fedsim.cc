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
#include "fedrec/fedsim.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

#include "str_util.h"
#include "fedrec/parallel.h"

namespace fedrec {
namespace {

// Stream tags for DeriveSeed. The evaluation candidates use their own tag
// inside BuildCandidateSets.
constexpr uint64_t kInitialModelTag = 0x1A17;
constexpr uint64_t kClientRoundTag = 0xC11E;

absl::Status Annotate(const absl::Status& status, std::string_view context) {
  return absl::Status(status.code(), StrCat(context, ": ",
                                                  status.message()));
}

// Fisher-Yates with our own integer draws so the order is portable.
void Shuffle(std::vector<int>& order, Rng& rng) {
  for (size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<size_t>(rng.UniformInt(i));
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace

absl::StatusOr<ServerOutput> ServerUpdate(const EmbeddingStack& uploads,
                                          const ExperimentConfig& config,
                                          const UserGraph* cached_graph,
                                          int round) {
  if (uploads.size() < 1) {
    return absl::InvalidArgumentError("server update needs >= 1 upload");
  }
  if (cached_graph != nullptr && cached_graph->size() != uploads.size()) {
    return absl::InvalidArgumentError(
        StrCat("cached graph has ", cached_graph->size(),
                     " nodes but there are ", uploads.size(), " uploads"));
  }
  ServerOutput out;
  if (config.aggregation == AggregationKind::kFedAvg) {
    auto global = GlobalEmbedding(uploads);
    if (!global.ok()) return global.status();
    out.global = *std::move(global);
    out.personalized =
        EmbeddingStack(uploads.size(), uploads.rows(), uploads.cols());
    const Eigen::Map<const Eigen::RowVectorXd> flat_global(
        out.global.data(), out.global.size());
    out.personalized.flat().rowwise() = flat_global;
    out.graph = FullyConnectedGraph(uploads.size());
    out.graph_rebuilt = cached_graph == nullptr;
    return out;
  }

  const bool rebuild = cached_graph == nullptr ||
                       (round - 1) % config.graph_update_every == 0;
  if (rebuild) {
    auto similarity = SimilarityMatrix(uploads);
    if (!similarity.ok()) return similarity.status();
    out.graph = BuildAdjacency(*similarity, config.gamma);
    ConnectIsolatedToSelf(out.graph);
  } else {
    out.graph = *cached_graph;
  }
  out.graph_rebuilt = rebuild;
  auto personalized = GraphAggregate(out.graph, uploads, config.conv_layers,
                                     config.normalization);
  if (!personalized.ok()) return personalized.status();
  out.personalized = *std::move(personalized);
  auto global = GlobalEmbedding(out.personalized);
  if (!global.ok()) return global.status();
  out.global = *std::move(global);
  return out;
}

absl::StatusOr<double> ClientUpdate(ClientModel& model,
                                    const EmbeddingMatrix& q_global,
                                    Eigen::Ref<const EmbeddingMatrix> r,
                                    const InteractionDataset& data,
                                    UserId user, const ExperimentConfig& config,
                                    double eta, Rng& rng,
                                    Eigen::Ref<EmbeddingMatrix> upload) {
  const Eigen::Index m = model.item_embedding.rows();
  const Eigen::Index d = model.item_embedding.cols();
  if (q_global.rows() != m || q_global.cols() != d || r.rows() != m ||
      r.cols() != d || upload.rows() != m || upload.cols() != d) {
    return absl::InvalidArgumentError(StrCat(
        "item tables must all be ", m, "x", d));
  }
  model.item_embedding = q_global;

  Gradients grads = Gradients::ZerosLike(model);
  double loss_sum = 0.0;
  int steps = 0;
  std::vector<ItemId> items;
  std::vector<double> labels;
  if (config.local_epochs == 0) {
    auto batch = SampleNegatives(data, user, config.negatives_per_positive, rng);
    if (!batch.ok()) return batch.status();
    auto loss = Backward(model, *batch, r, config.lambda, grads);
    if (!loss.ok()) return loss.status();
    loss_sum = *loss / static_cast<double>(std::max<size_t>(batch->size(), 1));
    steps = 1;
  }
  for (int epoch = 0; epoch < config.local_epochs; ++epoch) {
    auto batch = SampleNegatives(data, user, config.negatives_per_positive, rng);
    if (!batch.ok()) return batch.status();
    std::vector<int> order(batch->size());
    std::iota(order.begin(), order.end(), 0);
    Shuffle(order, rng);
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      items.clear();
      labels.clear();
      for (size_t k = start; k < end; ++k) {
        items.push_back(batch->item_ids[order[k]]);
        labels.push_back(batch->labels[order[k]]);
      }
      auto loss = Backward(model, SampleView(items, labels), r, config.lambda,
                           grads);
      if (!loss.ok()) return loss.status();
      if (!std::isfinite(*loss)) {
        return absl::OutOfRangeError(StrCat(
            "loss is not finite (learning rate ", eta,
            " too large?)"));
      }
      grads.item_embedding *= config.item_lr_scale;
      if (absl::Status s = SgdStep(model, grads, eta); !s.ok()) return s;
      loss_sum += *loss / static_cast<double>(items.size());
      ++steps;
    }
  }

  if (!AllFinite(model)) {
    return absl::OutOfRangeError(StrCat(
        "parameters are not finite (learning rate ", eta,
        " too large?)"));
  }
  // Finite but huge entries overflow the server's cosine norms.
  if (!std::isfinite(model.item_embedding.squaredNorm())) {
    return absl::OutOfRangeError(StrCat(
        "item embedding norm overflows (learning rate ", eta,
        " too large?)"));
  }
  if (config.delta > 0) {
    auto noised = AddLdpNoise(model.item_embedding, config.delta, rng);
    if (!noised.ok()) return noised.status();
    upload = *noised;
  } else {
    upload = model.item_embedding;
  }
  return steps > 0 ? loss_sum / steps : 0.0;
}

absl::StatusOr<Federation> Federation::Create(const InteractionDataset& data,
                                              const ExperimentConfig& config,
                                              double eta, int workers) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (!(eta > 0)) {
    return absl::InvalidArgumentError(
        StrCat("learning rate must be > 0, got ", eta));
  }
  const int n = data.n_users();
  const int m = data.n_items();
  if (n < 1 || m < 1) {
    return absl::InvalidArgumentError("federation needs users and items");
  }
  Federation fed(data, config, eta, std::max(workers, 1));
  fed.schedule_.resize(n);
  std::iota(fed.schedule_.begin(), fed.schedule_.end(), 0);

  Rng rng(DeriveSeed(config.seed, {kInitialModelTag}));
  auto initial = InitModel(config.ScoreSpec(), config.dim, m, rng);
  if (!initial.ok()) return initial.status();
  FederationState& state = fed.state_;
  state.models.assign(n, *initial);
  const EmbeddingMatrix& q0 = initial->item_embedding;
  state.uploads = EmbeddingStack(n, m, config.dim);
  state.personalized = EmbeddingStack(n, m, config.dim);
  state.personalized.flat().rowwise() =
      Eigen::Map<const Eigen::RowVectorXd>(q0.data(), q0.size());
  state.global = q0;
  return fed;
}

absl::StatusOr<RoundOutcome> Federation::RunRound() {
  FederationState& state = state_;
  const int n = static_cast<int>(state.models.size());
  if (static_cast<int>(schedule_.size()) != n) {
    return absl::FailedPreconditionError("schedule must cover every client");
  }
  RoundOutcome outcome;
  outcome.round = state.round + 1;
  const int t = outcome.round;

  if (t > 1) {
    auto server = ServerUpdate(state.uploads, config_,
                               state.graph ? &*state.graph : nullptr, t);
    if (!server.ok()) {
      return Annotate(server.status(), StrCat("round ", t, " server"));
    }
    state.personalized = std::move(server->personalized);
    state.global = std::move(server->global);
    state.graph = std::move(server->graph);
    outcome.graph_edges = state.graph->edge_count();
    outcome.graph_rebuilt = server->graph_rebuilt;
  }

  std::vector<double> losses(n, 0.0);
  std::vector<absl::Status> statuses(n);
  ParallelFor(n, workers_, [&](int k) {
    const int client = schedule_[k];
    Rng rng(DeriveSeed(config_.seed, {kClientRoundTag,
                                      static_cast<uint64_t>(t),
                                      static_cast<uint64_t>(client)}));
    auto loss = ClientUpdate(state.models[client], state.global,
                             state.personalized.at(client), *data_, client,
                             config_, eta_, rng, state.uploads.at(client));
    if (loss.ok()) {
      losses[client] = *loss;
    } else {
      statuses[client] = loss.status();
    }
  });
  for (int client = 0; client < n; ++client) {
    if (!statuses[client].ok()) {
      return Annotate(statuses[client],
                      StrCat("round ", t, " client ", client));
    }
  }
  double total = 0.0;
  for (double loss : losses) total += loss;
  outcome.mean_client_loss = total / n;
  state.round = t;
  return outcome;
}

int BestRoundIndex(const std::vector<RoundMetrics>& rounds) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(rounds.size()); ++i) {
    if (rounds[i].validation.hr > rounds[best].validation.hr) best = i;
  }
  return best;
}

absl::StatusOr<ExperimentReport> RunExperiment(
    const InteractionDataset& data, const ExperimentConfig& config,
    int workers, const ExperimentObserver& observer) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  auto candidates = BuildCandidateSets(data, config.eval_negatives, config.seed);
  if (!candidates.ok()) return candidates.status();

  ExperimentReport report;
  report.config = config;
  const std::vector<double> grid = config.EtaCandidates();
  int best_run = -1;
  for (double eta : grid) {
    auto fed = Federation::Create(data, config, eta, workers);
    if (!fed.ok()) return fed.status();
    EtaRun run;
    run.eta = eta;
    for (int t = 1; t <= config.rounds; ++t) {
      const auto start = std::chrono::steady_clock::now();
      auto outcome = fed->RunRound();
      if (!outcome.ok()) {
        const absl::Status status =
            Annotate(outcome.status(), StrCat("learning rate ", eta));
        if (grid.size() == 1 ||
            outcome.status().code() != absl::StatusCode::kOutOfRange) {
          return status;
        }
        run.diverged = true;
        run.error = std::string(status.message());
        break;
      }
      const auto& models = fed->state().models;
      auto validation = EvaluateAll(models, candidates->validation,
                                    config.top_k, workers);
      if (!validation.ok()) return validation.status();
      auto test = EvaluateAll(models, candidates->test, config.top_k, workers);
      if (!test.ok()) return test.status();

      RoundMetrics metrics;
      metrics.round = t;
      metrics.eta = eta;
      metrics.validation = *validation;
      metrics.test = *test;
      metrics.mean_client_loss = outcome->mean_client_loss;
      metrics.graph_edges = outcome->graph_edges;
      if (config.record_timing) {
        metrics.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
      }
      run.rounds.push_back(metrics);
      if (observer.on_graph && outcome->graph_rebuilt) {
        observer.on_graph(t, *fed->state().graph);
      }
      if (observer.on_round) observer.on_round(metrics);
    }
    run.best_index = BestRoundIndex(run.rounds);
    report.runs.push_back(std::move(run));
    const EtaRun& latest = report.runs.back();
    if (latest.diverged) continue;
    if (best_run < 0 || latest.best().validation.hr >
                            report.runs[best_run].best().validation.hr) {
      best_run = static_cast<int>(report.runs.size()) - 1;
    }
  }
  if (best_run < 0) {
    return absl::OutOfRangeError(StrCat(
        "every learning rate diverged; last: ", report.runs.back().error));
  }
  report.best_run = best_run;
  return report;
}

}  // namespace fedrec
