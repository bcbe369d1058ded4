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
#include "fedrec/graph.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "str_util.h"
#include "json.hpp"

namespace fedrec {

EmbeddingStack::EmbeddingStack(int count, int rows, int cols)
    : rows_(rows),
      cols_(cols),
      flat_(Flat::Zero(count, static_cast<Eigen::Index>(rows) * cols)) {}

absl::StatusOr<EmbeddingStack> EmbeddingStack::FromMatrices(
    std::span<const EmbeddingMatrix> matrices) {
  if (matrices.empty()) return absl::InvalidArgumentError("no matrices");
  const auto rows = static_cast<int>(matrices[0].rows());
  const auto cols = static_cast<int>(matrices[0].cols());
  EmbeddingStack stack(static_cast<int>(matrices.size()), rows, cols);
  for (size_t i = 0; i < matrices.size(); ++i) {
    if (matrices[i].rows() != rows || matrices[i].cols() != cols) {
      return absl::InvalidArgumentError(
          StrCat("matrix ", i, " is ", matrices[i].rows(), "x",
                       matrices[i].cols(), ", expected ", rows, "x", cols));
    }
    stack.at(static_cast<int>(i)) = matrices[i];
  }
  return stack;
}

absl::StatusOr<Eigen::MatrixXd> SimilarityMatrix(const EmbeddingStack& uploads) {
  const int n = uploads.size();
  if (n < 1) return absl::InvalidArgumentError("no uploads");
  const EmbeddingStack::Flat& q = uploads.flat();

  Eigen::VectorXd norms(n);
  for (int i = 0; i < n; ++i) {
    norms(i) = q.row(i).norm();
    if (!(norms(i) > 0.0) || !std::isfinite(norms(i))) {
      return absl::InvalidArgumentError(StrCat(
          "client ", i, " uploaded an embedding with norm ", norms(i)));
    }
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(q);

  Eigen::MatrixXd s(n, n);
  for (int j = 0; j < n; ++j) {
    s(j, j) = 1.0;
    for (int i = j + 1; i < n; ++i) {
      const double c =
          std::clamp(gram(i, j) / (norms(i) * norms(j)), -1.0, 1.0);
      s(i, j) = c;
      s(j, i) = c;
    }
  }
  return s;
}

int64_t UserGraph::edge_count() const {
  int64_t edges = 0;
  for (int d : degrees) edges += d;
  return edges;
}

UserGraph BuildAdjacency(const Eigen::MatrixXd& similarity, double gamma) {
  const auto n = static_cast<int>(similarity.rows());
  UserGraph graph;
  graph.gamma = gamma;
  graph.mean_similarity = n > 0 ? similarity.mean() : 0.0;
  const double threshold = gamma * graph.mean_similarity;
  graph.adjacency.resize(n, n);
  graph.degrees.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool edge = similarity(i, j) > threshold;
      graph.adjacency(i, j) = edge ? 1 : 0;
      graph.degrees[i] += edge ? 1 : 0;
    }
  }
  return graph;
}

UserGraph FullyConnectedGraph(int n) {
  UserGraph graph;
  graph.adjacency.setOnes(n, n);
  graph.degrees.assign(n, n);
  graph.mean_similarity = 1.0;
  return graph;
}

int ConnectIsolatedToSelf(UserGraph& graph) {
  int patched = 0;
  for (int i = 0; i < graph.size(); ++i) {
    if (graph.degrees[i] == 0) {
      graph.adjacency(i, i) = 1;
      graph.degrees[i] = 1;
      ++patched;
    }
  }
  return patched;
}

absl::StatusOr<Normalization> ParseNormalization(std::string_view name) {
  if (name == "row_normalized") return Normalization::kRowNormalized;
  if (name == "vanilla") return Normalization::kVanilla;
  return absl::InvalidArgumentError(StrCat(
      "unknown normalization '", name, "' (expected row_normalized or vanilla)"));
}

std::string_view NormalizationName(Normalization normalization) {
  return normalization == Normalization::kRowNormalized ? "row_normalized"
                                                        : "vanilla";
}

absl::StatusOr<EmbeddingStack> GraphAggregate(const UserGraph& graph,
                                              const EmbeddingStack& uploads,
                                              int layers,
                                              Normalization normalization) {
  const int n = graph.size();
  if (layers < 1) return absl::InvalidArgumentError("layers must be >= 1");
  if (uploads.size() != n) {
    return absl::InvalidArgumentError(StrCat(
        "graph has ", n, " nodes but there are ", uploads.size(), " uploads"));
  }
  Eigen::MatrixXd propagation = graph.adjacency.cast<double>();
  if (normalization == Normalization::kRowNormalized) {
    for (int i = 0; i < n; ++i) {
      if (graph.degrees[i] == 0) {
        return absl::FailedPreconditionError(StrCat(
            "client ", i, " has no neighbours; cannot row-normalize"));
      }
      propagation.row(i) /= static_cast<double>(graph.degrees[i]);
    }
  }
  EmbeddingStack::Flat r = propagation * uploads.flat();
  for (int layer = 1; layer < layers; ++layer) {
    r = propagation * r;
  }
  return EmbeddingStack::FromFlat(std::move(r), uploads.rows(), uploads.cols());
}

absl::StatusOr<EmbeddingMatrix> GlobalEmbedding(const EmbeddingStack& r) {
  if (r.size() < 1) return absl::InvalidArgumentError("no embeddings");
  const Eigen::RowVectorXd mean = r.flat().colwise().mean();
  return Eigen::Map<const EmbeddingMatrix>(mean.data(), r.rows(), r.cols());
}

absl::StatusOr<EmbeddingMatrix> AddLdpNoise(const EmbeddingMatrix& q,
                                            double delta, Rng& rng) {
  if (!(delta >= 0.0)) {
    return absl::InvalidArgumentError("noise scale must be >= 0");
  }
  EmbeddingMatrix noisy = q;
  if (delta == 0.0) return noisy;
  double* values = noisy.data();
  for (Eigen::Index k = 0; k < noisy.size(); ++k) {
    values[k] += rng.Laplace(delta);
  }
  return noisy;
}

std::string GraphRoundJson(const UserGraph& graph, int round) {
  std::map<int, int> histogram;
  for (int d : graph.degrees) ++histogram[d];
  nlohmann::ordered_json degrees = nlohmann::ordered_json::object();
  for (const auto& [degree, count] : histogram) {
    degrees[std::to_string(degree)] = count;
  }
  nlohmann::ordered_json doc = {
      {"round", round},
      {"gamma", graph.gamma},
      {"s_bar", graph.mean_similarity},
      {"nodes", graph.size()},
      {"edges", graph.edge_count()},
      {"degree_histogram", std::move(degrees)},
  };
  return doc.dump(2) + "\n";
}

}  // namespace fedrec
