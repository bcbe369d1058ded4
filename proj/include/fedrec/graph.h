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
// Server-side mathematics. Clients are related through the cosine
// similarity of their uploaded item-embedding tables; an edge exists where
// the similarity beats a multiple of the mean similarity, and each client's
// personalized target is its neighbourhood's propagated embedding.

#ifndef FEDREC_GRAPH_H_
#define FEDREC_GRAPH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "fedrec/model.h"
#include "fedrec/random.h"

namespace fedrec {

// N equally shaped embedding matrices stored as one N x (rows * cols)
// row-major block, so whole-federation products are single GEMMs.
class EmbeddingStack {
 public:
  using Flat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  EmbeddingStack() = default;
  EmbeddingStack(int count, int rows, int cols);

  static absl::StatusOr<EmbeddingStack> FromMatrices(
      std::span<const EmbeddingMatrix> matrices);
  // Takes ownership of a block whose rows each hold one rows x cols matrix.
  static EmbeddingStack FromFlat(Flat flat, int rows, int cols) {
    return EmbeddingStack(std::move(flat), rows, cols);
  }

  int size() const { return static_cast<int>(flat_.rows()); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Eigen::Map<EmbeddingMatrix> at(int i) {
    return Eigen::Map<EmbeddingMatrix>(flat_.row(i).data(), rows_, cols_);
  }
  Eigen::Map<const EmbeddingMatrix> at(int i) const {
    return Eigen::Map<const EmbeddingMatrix>(flat_.row(i).data(), rows_, cols_);
  }

  Flat& flat() { return flat_; }
  const Flat& flat() const { return flat_; }

 private:
  EmbeddingStack(Flat flat, int rows, int cols)
      : rows_(rows), cols_(cols), flat_(std::move(flat)) {}

  int rows_ = 0;
  int cols_ = 0;
  Flat flat_;
};

// S[i][j] = cos(flatten(q_i), flatten(q_j)); exactly symmetric, unit
// diagonal, entries clamped to [-1, 1]. Fails on an all-zero upload.
absl::StatusOr<Eigen::MatrixXd> SimilarityMatrix(const EmbeddingStack& uploads);

struct UserGraph {
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> adjacency;
  std::vector<int> degrees;
  double gamma = 0.0;
  double mean_similarity = 0.0;  // over all N^2 entries, diagonal included

  int size() const { return static_cast<int>(degrees.size()); }
  int64_t edge_count() const;  // ones in the adjacency, self-loops included
};

// A[i][j] = 1 iff S[i][j] > gamma * mean(S). Strict inequality.
UserGraph BuildAdjacency(const Eigen::MatrixXd& similarity, double gamma);

// Every-N-ones adjacency; the graph implied by uniform averaging.
UserGraph FullyConnectedGraph(int n);

// Gives every degree-0 node a self-loop and returns how many were patched.
int ConnectIsolatedToSelf(UserGraph& graph);

enum class Normalization {
  kRowNormalized,  // r_i = mean of neighbours, repeated per layer
  kVanilla,        // r_i = sum of neighbours, repeated per layer
};

absl::StatusOr<Normalization> ParseNormalization(std::string_view name);
std::string_view NormalizationName(Normalization normalization);

// R = A^layers Q under the chosen normalization. A degree-0 node is an error
// for kRowNormalized and yields a zero row for kVanilla.
absl::StatusOr<EmbeddingStack> GraphAggregate(const UserGraph& graph,
                                              const EmbeddingStack& uploads,
                                              int layers,
                                              Normalization normalization);

// Uniform mean of the personalized embeddings.
absl::StatusOr<EmbeddingMatrix> GlobalEmbedding(const EmbeddingStack& r);

// Adds independent Laplace(0, delta) noise to every element. delta == 0
// returns the input unchanged.
absl::StatusOr<EmbeddingMatrix> AddLdpNoise(const EmbeddingMatrix& q,
                                            double delta, Rng& rng);

// Audit record: round, gamma, mean similarity, edge count, degree histogram.
std::string GraphRoundJson(const UserGraph& graph, int round);

}  // namespace fedrec

#endif  // FEDREC_GRAPH_H_
