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
// Reference implementations written with plain loops and no shared code
// with the library beyond its data types. Tests and the acceptance binary
// compare the library against these.

#ifndef FEDREC_TESTS_TESTING_ORACLES_H_
#define FEDREC_TESTS_TESTING_ORACLES_H_

#include <vector>

#include "fedrec/graph.h"
#include "fedrec/model.h"
#include "fedrec/random.h"

namespace fedrec::testing {

using Grid = std::vector<std::vector<double>>;

// Model with every parameter ~ N(0, scale^2); unlike InitModel the
// embeddings are large enough for the score to depend on them.
ClientModel RandomModel(const ScoreFunctionSpec& spec, int dim, int num_items,
                        double scale, Rng& rng);

EmbeddingMatrix RandomMatrix(int rows, int cols, double scale, Rng& rng);

// Summed clamped BCE plus lambda times the mean squared difference, computed
// sample by sample.
double ReferenceLoss(const ClientModel& model, const std::vector<ItemId>& items,
                     const std::vector<double>& labels,
                     const EmbeddingMatrix& r, double lambda);

struct GradientCheck {
  double max_relative_error = 0.0;
  int parameters = 0;
};

// Compares Backward against central differences of ReferenceLoss over every
// parameter. Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradientCheck CheckGradients(const ClientModel& model,
                             const std::vector<ItemId>& items,
                             const std::vector<double>& labels,
                             const EmbeddingMatrix& r, double lambda,
                             double step);

Grid ReferenceSimilarity(const std::vector<EmbeddingMatrix>& uploads);
std::vector<std::vector<int>> ReferenceAdjacency(const Grid& similarity,
                                                 double gamma);
std::vector<EmbeddingMatrix> ReferenceAggregate(
    const std::vector<std::vector<int>>& adjacency,
    const std::vector<EmbeddingMatrix>& uploads, int layers,
    Normalization normalization);
EmbeddingMatrix ReferenceMean(const std::vector<EmbeddingMatrix>& matrices);

double MaxAbsDiff(const EmbeddingMatrix& a, const EmbeddingMatrix& b);
// Over every parameter; infinity when shapes differ.
double MaxAbsDiff(const ClientModel& a, const ClientModel& b);

}  // namespace fedrec::testing

#endif  // FEDREC_TESTS_TESTING_ORACLES_H_
