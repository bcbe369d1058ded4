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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "fmt/format.h"
#include "fmt/ranges.h"
#include "str_util.h"

namespace fedrec {
namespace {

absl::StatusOr<double> ParseDouble(std::string_view key, std::string_view s) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
      !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        StrCat(key, ": '", s, "' is not a finite number"));
  }
  return value;
}

template <typename Int>
absl::StatusOr<Int> ParseInteger(std::string_view key, std::string_view s) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    return absl::InvalidArgumentError(
        StrCat(key, ": '", s, "' is not an integer"));
  }
  return value;
}

absl::StatusOr<bool> ParseBool(std::string_view key, std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes") return true;
  if (lower == "false" || lower == "0" || lower == "no") return false;
  return absl::InvalidArgumentError(
      StrCat(key, ": '", s, "' is not a boolean"));
}

template <typename T, typename Parse>
absl::StatusOr<std::vector<T>> ParseList(std::string_view key,
                                         std::string_view s, Parse parse) {
  std::vector<T> out;
  for (std::string_view part : SplitList(s, ',')) {
    auto value = parse(key, part);
    if (!value.ok()) return value.status();
    out.push_back(*value);
  }
  return out;
}

using Setter = std::function<absl::Status(RunConfig&, std::string_view)>;

template <typename T, typename Parse>
Setter Assign(T ExperimentConfig::*field, Parse parse, std::string key) {
  return [field, parse, key](RunConfig& c, std::string_view v) -> absl::Status {
    auto value = parse(key, v);
    if (!value.ok()) return value.status();
    c.experiment.*field = *value;
    return absl::OkStatus();
  };
}

struct KeyEntry {
  std::string key;
  Setter set;
};

const std::vector<KeyEntry>& KeyTable() {
  static const auto* table = new std::vector<KeyEntry>{
      {"lambda", Assign(&ExperimentConfig::lambda, ParseDouble, "lambda")},
      {"gamma", Assign(&ExperimentConfig::gamma, ParseDouble, "gamma")},
      {"eta", Assign(&ExperimentConfig::eta, ParseDouble, "eta")},
      {"item_lr_scale", Assign(&ExperimentConfig::item_lr_scale, ParseDouble, "item_lr_scale")},
      {"eta_grid",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         auto grid = ParseList<double>("eta_grid", v, ParseDouble);
         if (!grid.ok()) return grid.status();
         c.experiment.eta_grid = *grid;
         return absl::OkStatus();
       }},
      {"delta", Assign(&ExperimentConfig::delta, ParseDouble, "delta")},
      {"dim", Assign(&ExperimentConfig::dim, ParseInteger<int>, "dim")},
      {"local_epochs", Assign(&ExperimentConfig::local_epochs,
                              ParseInteger<int>, "local_epochs")},
      {"rounds", Assign(&ExperimentConfig::rounds, ParseInteger<int>, "rounds")},
      {"conv_layers", Assign(&ExperimentConfig::conv_layers, ParseInteger<int>,
                             "conv_layers")},
      {"batch_size", Assign(&ExperimentConfig::batch_size, ParseInteger<int>,
                            "batch_size")},
      {"negatives_per_positive",
       Assign(&ExperimentConfig::negatives_per_positive, ParseInteger<int>,
              "negatives_per_positive")},
      {"eval_negatives", Assign(&ExperimentConfig::eval_negatives,
                                ParseInteger<int>, "eval_negatives")},
      {"top_k", Assign(&ExperimentConfig::top_k, ParseInteger<int>, "top_k")},
      {"aggregation",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         auto kind = ParseAggregation(v);
         if (!kind.ok()) return kind.status();
         c.experiment.aggregation = *kind;
         return absl::OkStatus();
       }},
      {"backbone",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         auto backbone = ParseBackbone(v);
         if (!backbone.ok()) return backbone.status();
         c.experiment.backbone = *backbone;
         return absl::OkStatus();
       }},
      {"hidden_sizes",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         auto sizes = ParseList<int>("hidden_sizes", v, ParseInteger<int>);
         if (!sizes.ok()) return sizes.status();
         c.experiment.hidden_sizes = *sizes;
         return absl::OkStatus();
       }},
      {"normalization",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         auto normalization = ParseNormalization(v);
         if (!normalization.ok()) return normalization.status();
         c.experiment.normalization = *normalization;
         return absl::OkStatus();
       }},
      {"graph_update_every", Assign(&ExperimentConfig::graph_update_every,
                                    ParseInteger<int>, "graph_update_every")},
      {"seed", Assign(&ExperimentConfig::seed, ParseInteger<uint64_t>, "seed")},
      {"timing",
       Assign(&ExperimentConfig::record_timing, ParseBool, "timing")},
      {"data",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         c.data_path = std::string(v);
         return absl::OkStatus();
       }},
      {"out",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         c.out_dir = std::string(v);
         return absl::OkStatus();
       }},
      {"workers",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         auto workers = ParseInteger<int>("workers", v);
         if (!workers.ok()) return workers.status();
         if (*workers < 1) {
           return absl::InvalidArgumentError("workers must be >= 1");
         }
         c.workers = *workers;
         return absl::OkStatus();
       }},
      {"dump_graph",
       [](RunConfig& c, std::string_view v) -> absl::Status {
         auto flag = ParseBool("dump_graph", v);
         if (!flag.ok()) return flag.status();
         c.dump_graph = *flag;
         return absl::OkStatus();
       }},
  };
  return *table;
}

std::string FormatDouble(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

absl::StatusOr<AggregationKind> ParseAggregation(std::string_view name) {
  if (name == "graph_agg") return AggregationKind::kGraphAgg;
  if (name == "fed_avg") return AggregationKind::kFedAvg;
  return absl::InvalidArgumentError(StrCat(
      "unknown aggregation '", name, "' (expected graph_agg or fed_avg)"));
}

std::string_view AggregationName(AggregationKind kind) {
  return kind == AggregationKind::kGraphAgg ? "graph_agg" : "fed_avg";
}

absl::StatusOr<Backbone> ParseBackbone(std::string_view name) {
  if (name == "ncf") return Backbone::kNcf;
  if (name == "mf") return Backbone::kMf;
  return absl::InvalidArgumentError(
      StrCat("unknown backbone '", name, "' (expected ncf or mf)"));
}

std::string_view BackboneName(Backbone backbone) {
  return backbone == Backbone::kNcf ? "ncf" : "mf";
}

std::vector<double> ExperimentConfig::EtaCandidates() const {
  return eta_grid.empty() ? std::vector<double>{eta} : eta_grid;
}

ScoreFunctionSpec ExperimentConfig::ScoreSpec() const {
  if (backbone == Backbone::kMf) return {ScoreKind::kDotProduct, {}};
  return {ScoreKind::kMlp, hidden_sizes};
}

absl::Status ExperimentConfig::Validate() const {
  auto fail = [](auto&&... parts) {
    return absl::InvalidArgumentError(StrCat(parts...));
  };
  if (!(lambda >= 0)) return fail("lambda must be >= 0, got ", lambda);
  if (!(gamma >= 0)) return fail("gamma must be >= 0, got ", gamma);
  if (!(delta >= 0)) return fail("delta must be >= 0, got ", delta);
  if (!(item_lr_scale > 0) || !std::isfinite(item_lr_scale)) {
    return fail("item_lr_scale must be > 0, got ", item_lr_scale);
  }
  for (double e : EtaCandidates()) {
    if (!(e > 0)) return fail("learning rates must be > 0, got ", e);
  }
  if (dim < 1) return fail("dim must be >= 1, got ", dim);
  if (local_epochs < 0) return fail("local_epochs must be >= 0");
  if (rounds < 1) return fail("rounds must be >= 1, got ", rounds);
  if (conv_layers < 1) return fail("conv_layers must be >= 1");
  if (batch_size < 1) return fail("batch_size must be >= 1");
  if (negatives_per_positive < 0) return fail("negatives_per_positive must be >= 0");
  if (eval_negatives < 0) return fail("eval_negatives must be >= 0");
  if (top_k < 1) return fail("top_k must be >= 1");
  if (graph_update_every < 1) return fail("graph_update_every must be >= 1");
  if (backbone == Backbone::kNcf) {
    for (int h : hidden_sizes) {
      if (h < 1) return fail("hidden sizes must be >= 1");
    }
  }
  return absl::OkStatus();
}

const std::vector<std::string>& ConfigKeys() {
  static const auto* keys = [] {
    auto* out = new std::vector<std::string>;
    for (const KeyEntry& entry : KeyTable()) out->push_back(entry.key);
    return out;
  }();
  return *keys;
}

absl::Status ApplySetting(RunConfig& config, std::string_view key,
                          std::string_view value) {
  std::string canonical(key);
  std::replace(canonical.begin(), canonical.end(), '-', '_');
  if (canonical == "d") canonical = "dim";
  const auto& table = KeyTable();
  const auto it =
      std::find_if(table.begin(), table.end(),
                   [&](const KeyEntry& e) { return e.key == canonical; });
  if (it == table.end()) {
    return absl::InvalidArgumentError(
        StrCat("unknown config key '", key, "'; valid keys: ",
                     fmt::format("{}", fmt::join(ConfigKeys(), ", "))));
  }
  return it->set(config, StripWhitespace(value));
}

absl::Status ApplyConfigText(RunConfig& config, std::string_view text,
                             std::string_view source) {
  int line_no = 0;
  for (std::string_view line : StrSplit(text, "\n")) {
    ++line_no;
    line = StripWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError(
          StrCat(source, ":", line_no, ": expected key = value"));
    }
    const std::string_view key = StripWhitespace(line.substr(0, eq));
    const std::string_view value = line.substr(eq + 1);
    if (absl::Status s = ApplySetting(config, key, value); !s.ok()) {
      return absl::InvalidArgumentError(
          StrCat(source, ":", line_no, ": ", s.message()));
    }
  }
  return absl::OkStatus();
}

absl::Status ApplyConfigFile(RunConfig& config,
                             const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        StrCat("cannot open config '", path.string(), "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ApplyConfigText(config, buffer.str(), path.string());
}

std::string ConfigToText(const RunConfig& config) {
  const ExperimentConfig& e = config.experiment;
  std::vector<std::string> grid;
  for (double eta : e.eta_grid) grid.push_back(FormatDouble(eta));
  std::ostringstream out;
  out << "lambda = " << FormatDouble(e.lambda) << '\n'
      << "gamma = " << FormatDouble(e.gamma) << '\n'
      << "eta = " << FormatDouble(e.eta) << '\n'
      << "item_lr_scale = " << FormatDouble(e.item_lr_scale) << '\n'
      << "eta_grid = " << fmt::format("{}", fmt::join(grid, ",")) << '\n'
      << "delta = " << FormatDouble(e.delta) << '\n'
      << "dim = " << e.dim << '\n'
      << "local_epochs = " << e.local_epochs << '\n'
      << "rounds = " << e.rounds << '\n'
      << "conv_layers = " << e.conv_layers << '\n'
      << "batch_size = " << e.batch_size << '\n'
      << "negatives_per_positive = " << e.negatives_per_positive << '\n'
      << "eval_negatives = " << e.eval_negatives << '\n'
      << "top_k = " << e.top_k << '\n'
      << "aggregation = " << AggregationName(e.aggregation) << '\n'
      << "backbone = " << BackboneName(e.backbone) << '\n'
      << "hidden_sizes = " << fmt::format("{}", fmt::join(e.hidden_sizes, ",")) << '\n'
      << "normalization = " << NormalizationName(e.normalization) << '\n'
      << "graph_update_every = " << e.graph_update_every << '\n'
      << "seed = " << e.seed << '\n'
      << "timing = " << (e.record_timing ? "true" : "false") << '\n'
      << "data = " << config.data_path << '\n'
      << "out = " << config.out_dir << '\n'
      << "workers = " << config.workers << '\n'
      << "dump_graph = " << (config.dump_graph ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace fedrec
