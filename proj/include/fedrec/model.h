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
// Per-client recommender: a private user embedding, a full item embedding
// table (the only part ever shared with the server) and a private score
// function, either an MLP over concat(user, item) or a plain dot product.
// Gradients are derived by hand for these two architectures.

#ifndef FEDREC_MODEL_H_
#define FEDREC_MODEL_H_

#include <span>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fedrec/dataset.h"
#include "fedrec/random.h"

namespace fedrec {

// Items x dimension, row-major so that one item is one contiguous row.
using EmbeddingMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ScoreKind { kMlp, kDotProduct };

absl::StatusOr<ScoreKind> ParseScoreKind(std::string_view name);
std::string_view ScoreKindName(ScoreKind kind);

// Hidden layers use ReLU, the output is a sigmoid. `hidden_sizes` is ignored
// for the dot product.
struct ScoreFunctionSpec {
  ScoreKind kind = ScoreKind::kMlp;
  std::vector<int> hidden_sizes = {32, 16, 8};

  bool operator==(const ScoreFunctionSpec&) const = default;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
};

struct ClientModel {
  ScoreFunctionSpec spec;
  Eigen::VectorXd user_embedding;
  EmbeddingMatrix item_embedding;
  std::vector<DenseLayer> layers;

  int dim() const { return static_cast<int>(user_embedding.size()); }
  int num_items() const { return static_cast<int>(item_embedding.rows()); }
};

// Same shapes as the model being differentiated.
struct Gradients {
  Eigen::VectorXd user_embedding;
  EmbeddingMatrix item_embedding;
  std::vector<DenseLayer> layers;

  static Gradients ZerosLike(const ClientModel& model);
};

// A run of labelled samples; TrainingBatch converts implicitly.
struct SampleView {
  std::span<const ItemId> items;
  std::span<const double> labels;

  SampleView(std::span<const ItemId> items, std::span<const double> labels)
      : items(items), labels(labels) {}
  SampleView(const TrainingBatch& batch)  // NOLINT
      : items(batch.item_ids), labels(batch.labels) {}
};

// Embeddings ~ N(0, 0.01^2); MLP weights ~ N(0, 2 / fan_in); biases zero.
absl::StatusOr<ClientModel> InitModel(const ScoreFunctionSpec& spec, int dim,
                                      int num_items, Rng& rng);

// Layer shapes chain 2*dim -> hidden... -> 1 and every value is finite.
absl::Status ValidateModel(const ClientModel& model);
bool AllFinite(const ClientModel& model);

absl::StatusOr<double> Predict(const ClientModel& model, ItemId item);
// Probabilities for many items at once; unchecked item ranges.
Eigen::VectorXd PredictMany(const ClientModel& model,
                            std::span<const ItemId> items);

inline constexpr double kProbabilityEpsilon = 1e-7;

// Summed binary cross-entropy with predictions clamped to [eps, 1 - eps].
absl::StatusOr<double> BceLoss(std::span<const double> predictions,
                               std::span<const double> labels);

// Mean squared difference over every element.
absl::StatusOr<double> RegLoss(Eigen::Ref<const EmbeddingMatrix> q,
                               Eigen::Ref<const EmbeddingMatrix> r);

// Writes d/dtheta of BceLoss(batch) + lambda * RegLoss(q, r) into `grads`
// (resized as needed) and returns that loss. The regularizer reaches every
// item row, not only the rows in the batch.
absl::StatusOr<double> Backward(const ClientModel& model, SampleView batch,
                                Eigen::Ref<const EmbeddingMatrix> r,
                                double lambda, Gradients& grads);

// theta <- theta - eta * grad, in place.
absl::Status SgdStep(ClientModel& model, const Gradients& grads, double eta);

// Versioned JSON checkpoint with the spec, shapes and row-major parameters.
std::string ModelToJson(const ClientModel& model);
absl::StatusOr<ClientModel> ModelFromJson(std::string_view json);

}  // namespace fedrec

#endif  // FEDREC_MODEL_H_
