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
#include "fedrec/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "str_util.h"
#include "json.hpp"

namespace fedrec {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Saturated logits would round to exactly 0 or 1; keep the output strictly
// inside the open interval so callers can take logs without special cases.
double Sigmoid(double z) {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(1.0 / (1.0 + std::exp(-z)), kLow, kHigh);
}

absl::Status CheckBatch(const ClientModel& model, SampleView batch) {
  if (batch.items.size() != batch.labels.size()) {
    return absl::InvalidArgumentError(
        StrCat("batch has ", batch.items.size(), " items but ",
                     batch.labels.size(), " labels"));
  }
  if (batch.items.empty()) return absl::InvalidArgumentError("empty batch");
  for (ItemId item : batch.items) {
    if (item < 0 || item >= model.num_items()) {
      return absl::OutOfRangeError(
          StrCat("item ", item, " outside [0, ", model.num_items(), ")"));
    }
  }
  return absl::OkStatus();
}

// Rows are [user_embedding, item_embedding[item]].
RowMatrix ConcatInputs(const ClientModel& model,
                       std::span<const ItemId> items) {
  const int d = model.dim();
  RowMatrix x(static_cast<Eigen::Index>(items.size()), 2 * d);
  for (size_t b = 0; b < items.size(); ++b) {
    x.row(b).head(d) = model.user_embedding.transpose();
    x.row(b).tail(d) = model.item_embedding.row(items[b]);
  }
  return x;
}

// Logits for a batch; `activations` receives the input and every hidden
// activation, `pre_activations` every hidden pre-activation.
Eigen::VectorXd MlpLogits(const ClientModel& model,
                          std::span<const ItemId> items,
                          std::vector<RowMatrix>* activations,
                          std::vector<RowMatrix>* pre_activations) {
  RowMatrix a = ConcatInputs(model, items);
  const size_t n_layers = model.layers.size();
  for (size_t k = 0; k + 1 < n_layers; ++k) {
    const DenseLayer& layer = model.layers[k];
    RowMatrix z = a * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    if (activations != nullptr) activations->push_back(std::move(a));
    a = z.cwiseMax(0.0);
    if (pre_activations != nullptr) pre_activations->push_back(std::move(z));
  }
  const DenseLayer& out = model.layers.back();
  Eigen::VectorXd logits = a * out.weights.transpose();
  logits.array() += out.bias(0);
  if (activations != nullptr) activations->push_back(std::move(a));
  return logits;
}

Eigen::VectorXd DotLogits(const ClientModel& model,
                          std::span<const ItemId> items) {
  Eigen::VectorXd logits(static_cast<Eigen::Index>(items.size()));
  for (size_t b = 0; b < items.size(); ++b) {
    logits(b) = model.item_embedding.row(items[b]).dot(model.user_embedding);
  }
  return logits;
}

double BceUnchecked(const Eigen::VectorXd& predictions,
                    std::span<const double> labels) {
  double loss = 0.0;
  for (size_t b = 0; b < labels.size(); ++b) {
    const double p = std::clamp(predictions(b), kProbabilityEpsilon,
                                1.0 - kProbabilityEpsilon);
    loss -= labels[b] > 0.5 ? std::log(p) : std::log1p(-p);
  }
  return loss;
}

}  // namespace

absl::StatusOr<ScoreKind> ParseScoreKind(std::string_view name) {
  if (name == "mlp" || name == "ncf") return ScoreKind::kMlp;
  if (name == "dot_product" || name == "dot" || name == "mf") {
    return ScoreKind::kDotProduct;
  }
  return absl::InvalidArgumentError(
      StrCat("unknown score function '", name, "'"));
}

std::string_view ScoreKindName(ScoreKind kind) {
  return kind == ScoreKind::kMlp ? "mlp" : "dot_product";
}

Gradients Gradients::ZerosLike(const ClientModel& model) {
  Gradients g;
  g.user_embedding = Eigen::VectorXd::Zero(model.user_embedding.size());
  g.item_embedding = EmbeddingMatrix::Zero(model.item_embedding.rows(),
                                           model.item_embedding.cols());
  g.layers.reserve(model.layers.size());
  for (const DenseLayer& layer : model.layers) {
    g.layers.push_back(
        {Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
         Eigen::VectorXd::Zero(layer.bias.size())});
  }
  return g;
}

absl::StatusOr<ClientModel> InitModel(const ScoreFunctionSpec& spec, int dim,
                                      int num_items, Rng& rng) {
  if (dim < 1) return absl::InvalidArgumentError("dimension must be >= 1");
  if (num_items < 1) return absl::InvalidArgumentError("item count must be >= 1");
  ClientModel model;
  model.spec = spec;
  model.user_embedding.resize(dim);
  for (int c = 0; c < dim; ++c) model.user_embedding(c) = rng.Normal(0, 0.01);
  model.item_embedding.resize(num_items, dim);
  for (int m = 0; m < num_items; ++m) {
    for (int c = 0; c < dim; ++c) model.item_embedding(m, c) = rng.Normal(0, 0.01);
  }
  if (spec.kind == ScoreKind::kMlp) {
    int fan_in = 2 * dim;
    std::vector<int> widths = spec.hidden_sizes;
    widths.push_back(1);
    for (int width : widths) {
      if (width < 1) {
        return absl::InvalidArgumentError("hidden sizes must be >= 1");
      }
      DenseLayer layer{Eigen::MatrixXd(width, fan_in),
                       Eigen::VectorXd::Zero(width)};
      const double stddev = std::sqrt(2.0 / fan_in);
      for (int o = 0; o < width; ++o) {
        for (int i = 0; i < fan_in; ++i) layer.weights(o, i) = rng.Normal(0, stddev);
      }
      model.layers.push_back(std::move(layer));
      fan_in = width;
    }
  }
  return model;
}

bool AllFinite(const ClientModel& model) {
  if (!model.user_embedding.allFinite() || !model.item_embedding.allFinite()) {
    return false;
  }
  return std::all_of(model.layers.begin(), model.layers.end(),
                     [](const DenseLayer& layer) {
                       return layer.weights.allFinite() &&
                              layer.bias.allFinite();
                     });
}

absl::Status ValidateModel(const ClientModel& model) {
  if (model.dim() < 1) return absl::InvalidArgumentError("empty user embedding");
  if (model.item_embedding.cols() != model.dim()) {
    return absl::InvalidArgumentError(
        StrCat("item embedding has ", model.item_embedding.cols(),
                     " columns, user embedding has ", model.dim()));
  }
  if (model.spec.kind == ScoreKind::kMlp) {
    if (model.layers.size() != model.spec.hidden_sizes.size() + 1) {
      return absl::InvalidArgumentError("layer count does not match spec");
    }
    Eigen::Index fan_in = 2 * model.dim();
    for (size_t k = 0; k < model.layers.size(); ++k) {
      const DenseLayer& layer = model.layers[k];
      const Eigen::Index width =
          k < model.spec.hidden_sizes.size() ? model.spec.hidden_sizes[k] : 1;
      if (layer.weights.rows() != width || layer.weights.cols() != fan_in ||
          layer.bias.size() != width) {
        return absl::InvalidArgumentError(
            StrCat("layer ", k, " has shape ", layer.weights.rows(), "x",
                         layer.weights.cols(), ", expected ", width, "x",
                         fan_in));
      }
      fan_in = width;
    }
  } else if (!model.layers.empty()) {
    return absl::InvalidArgumentError("dot-product model carries MLP layers");
  }
  if (!AllFinite(model)) {
    return absl::InvalidArgumentError("model has non-finite parameters");
  }
  return absl::OkStatus();
}

Eigen::VectorXd PredictMany(const ClientModel& model,
                            std::span<const ItemId> items) {
  Eigen::VectorXd logits = model.spec.kind == ScoreKind::kMlp
                               ? MlpLogits(model, items, nullptr, nullptr)
                               : DotLogits(model, items);
  return logits.unaryExpr(&Sigmoid);
}

absl::StatusOr<double> Predict(const ClientModel& model, ItemId item) {
  if (item < 0 || item >= model.num_items()) {
    return absl::OutOfRangeError(
        StrCat("item ", item, " outside [0, ", model.num_items(), ")"));
  }
  const ItemId items[] = {item};
  return PredictMany(model, items)(0);
}

absl::StatusOr<double> BceLoss(std::span<const double> predictions,
                               std::span<const double> labels) {
  if (predictions.size() != labels.size()) {
    return absl::InvalidArgumentError(
        StrCat("got ", predictions.size(), " predictions and ",
                     labels.size(), " labels"));
  }
  if (predictions.empty()) return absl::InvalidArgumentError("empty batch");
  const Eigen::Map<const Eigen::VectorXd> p(
      predictions.data(), static_cast<Eigen::Index>(predictions.size()));
  return BceUnchecked(p, labels);
}

absl::StatusOr<double> RegLoss(Eigen::Ref<const EmbeddingMatrix> q,
                               Eigen::Ref<const EmbeddingMatrix> r) {
  if (q.rows() != r.rows() || q.cols() != r.cols()) {
    return absl::InvalidArgumentError(
        StrCat("shape mismatch: ", q.rows(), "x", q.cols(), " vs ",
                     r.rows(), "x", r.cols()));
  }
  if (q.size() == 0) return 0.0;
  return (q - r).squaredNorm() / static_cast<double>(q.size());
}

absl::StatusOr<double> Backward(const ClientModel& model, SampleView batch,
                                Eigen::Ref<const EmbeddingMatrix> r,
                                double lambda, Gradients& grads) {
  if (absl::Status s = CheckBatch(model, batch); !s.ok()) return s;
  if (lambda < 0) return absl::InvalidArgumentError("lambda must be >= 0");
  absl::StatusOr<double> reg = RegLoss(model.item_embedding, r);
  if (!reg.ok()) return reg.status();

  const int d = model.dim();
  const auto n = static_cast<Eigen::Index>(batch.items.size());
  const Eigen::Map<const Eigen::VectorXd> labels(batch.labels.data(), n);

  // Regularizer: d/dq of lambda * mean((q - r)^2).
  const double reg_scale =
      2.0 * lambda / static_cast<double>(model.item_embedding.size());
  grads.item_embedding = reg_scale * (model.item_embedding - r);
  grads.user_embedding = Eigen::VectorXd::Zero(d);

  double bce = 0.0;
  if (model.spec.kind == ScoreKind::kDotProduct) {
    grads.layers.clear();
    const Eigen::VectorXd y_hat = DotLogits(model, batch.items).unaryExpr(&Sigmoid);
    bce = BceUnchecked(y_hat, batch.labels);
    // The clamp only guards the logarithms; the logit gradient is the
    // unclamped y_hat - y.
    const Eigen::VectorXd dz = y_hat - labels;
    for (Eigen::Index b = 0; b < n; ++b) {
      const ItemId item = batch.items[b];
      grads.user_embedding += dz(b) * model.item_embedding.row(item).transpose();
      grads.item_embedding.row(item) += dz(b) * model.user_embedding.transpose();
    }
    return bce + lambda * *reg;
  }

  std::vector<RowMatrix> activations;
  std::vector<RowMatrix> pre_activations;
  const Eigen::VectorXd y_hat =
      MlpLogits(model, batch.items, &activations, &pre_activations)
          .unaryExpr(&Sigmoid);
  bce = BceUnchecked(y_hat, batch.labels);

  const size_t n_layers = model.layers.size();
  grads.layers.resize(n_layers);
  RowMatrix delta = y_hat - labels;  // n x 1
  for (size_t k = n_layers; k-- > 0;) {
    const RowMatrix& input = activations[k];
    grads.layers[k].weights = delta.transpose() * input;
    grads.layers[k].bias = delta.colwise().sum().transpose();
    RowMatrix upstream = delta * model.layers[k].weights;
    if (k > 0) {
      delta = upstream.cwiseProduct(
          (pre_activations[k - 1].array() > 0.0).cast<double>().matrix());
    } else {
      delta = std::move(upstream);  // gradient w.r.t. the concatenated input
    }
  }
  for (Eigen::Index b = 0; b < n; ++b) {
    grads.user_embedding += delta.row(b).head(d).transpose();
    grads.item_embedding.row(batch.items[b]) += delta.row(b).tail(d);
  }
  return bce + lambda * *reg;
}

absl::Status SgdStep(ClientModel& model, const Gradients& grads, double eta) {
  if (grads.user_embedding.size() != model.user_embedding.size() ||
      grads.item_embedding.rows() != model.item_embedding.rows() ||
      grads.item_embedding.cols() != model.item_embedding.cols() ||
      grads.layers.size() != model.layers.size()) {
    return absl::InvalidArgumentError("gradient shape does not match model");
  }
  for (size_t k = 0; k < model.layers.size(); ++k) {
    if (grads.layers[k].weights.rows() != model.layers[k].weights.rows() ||
        grads.layers[k].weights.cols() != model.layers[k].weights.cols() ||
        grads.layers[k].bias.size() != model.layers[k].bias.size()) {
      return absl::InvalidArgumentError(
          StrCat("gradient shape of layer ", k, " does not match model"));
    }
  }
  model.user_embedding -= eta * grads.user_embedding;
  model.item_embedding -= eta * grads.item_embedding;
  for (size_t k = 0; k < model.layers.size(); ++k) {
    model.layers[k].weights -= eta * grads.layers[k].weights;
    model.layers[k].bias -= eta * grads.layers[k].bias;
  }
  return absl::OkStatus();
}

namespace {

template <typename Derived>
nlohmann::json RowMajorValues(const Eigen::DenseBase<Derived>& m) {
  std::vector<double> values;
  values.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) values.push_back(m(i, j));
  }
  return values;
}

template <typename MatrixType>
absl::Status FillRowMajor(const nlohmann::json& values, MatrixType& m) {
  if (!values.is_array() || values.size() != static_cast<size_t>(m.size())) {
    return absl::InvalidArgumentError("parameter array has the wrong length");
  }
  size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = values[k++].get<double>();
    }
  }
  return absl::OkStatus();
}

constexpr std::string_view kCheckpointFormat = "fedrec-model/1";

}  // namespace

std::string ModelToJson(const ClientModel& model) {
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const DenseLayer& layer : model.layers) {
    layers.push_back({{"shape", {layer.weights.rows(), layer.weights.cols()}},
                      {"weights", RowMajorValues(layer.weights)},
                      {"bias", RowMajorValues(layer.bias)}});
  }
  nlohmann::ordered_json doc = {
      {"format", kCheckpointFormat},
      {"score_function", ScoreKindName(model.spec.kind)},
      {"hidden_sizes", model.spec.hidden_sizes},
      {"dim", model.dim()},
      {"num_items", model.num_items()},
      {"user_embedding", RowMajorValues(model.user_embedding)},
      {"item_embedding", RowMajorValues(model.item_embedding)},
      {"layers", std::move(layers)},
  };
  return doc.dump();
}

absl::StatusOr<ClientModel> ModelFromJson(std::string_view json) {
  const nlohmann::json doc = nlohmann::json::parse(json, nullptr, false);
  if (doc.is_discarded()) return absl::InvalidArgumentError("invalid JSON");
  try {
    if (doc.at("format").get<std::string>() != kCheckpointFormat) {
      return absl::InvalidArgumentError("unsupported checkpoint format");
    }
    auto kind = ParseScoreKind(doc.at("score_function").get<std::string>());
    if (!kind.ok()) return kind.status();
    ClientModel model;
    model.spec.kind = *kind;
    model.spec.hidden_sizes = doc.at("hidden_sizes").get<std::vector<int>>();
    const int dim = doc.at("dim").get<int>();
    const int num_items = doc.at("num_items").get<int>();
    model.user_embedding.resize(dim);
    model.item_embedding.resize(num_items, dim);
    if (auto s = FillRowMajor(doc.at("user_embedding"), model.user_embedding);
        !s.ok()) {
      return s;
    }
    if (auto s = FillRowMajor(doc.at("item_embedding"), model.item_embedding);
        !s.ok()) {
      return s;
    }
    for (const auto& entry : doc.at("layers")) {
      const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
      if (shape.size() != 2) return absl::InvalidArgumentError("bad layer shape");
      DenseLayer layer{Eigen::MatrixXd(shape[0], shape[1]),
                       Eigen::VectorXd(shape[0])};
      if (auto s = FillRowMajor(entry.at("weights"), layer.weights); !s.ok()) {
        return s;
      }
      if (auto s = FillRowMajor(entry.at("bias"), layer.bias); !s.ok()) return s;
      model.layers.push_back(std::move(layer));
    }
    if (auto s = ValidateModel(model); !s.ok()) return s;
    return model;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        StrCat("malformed checkpoint: ", e.what()));
  }
}

}  // namespace fedrec
