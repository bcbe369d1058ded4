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
#include "fedrec/report.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <system_error>

#include "fmt/format.h"
#include "json.hpp"
#include "str_util.h"

namespace fedrec {
namespace {

using nlohmann::ordered_json;

double Round4(double v) { return std::round(v * 1e4) / 1e4; }

ordered_json MetricsJson(const RankingMetrics& m) {
  return {{"hr10", Round4(m.hr)}, {"ndcg10", Round4(m.ndcg)}};
}

ordered_json ConfigJson(const RunConfig& run) {
  const ExperimentConfig& e = run.experiment;
  return {
      {"lambda", e.lambda},
      {"gamma", e.gamma},
      {"eta", e.eta},
      {"item_lr_scale", e.item_lr_scale},
      {"eta_grid", e.EtaCandidates()},
      {"delta", e.delta},
      {"dim", e.dim},
      {"local_epochs", e.local_epochs},
      {"rounds", e.rounds},
      {"conv_layers", e.conv_layers},
      {"batch_size", e.batch_size},
      {"negatives_per_positive", e.negatives_per_positive},
      {"eval_negatives", e.eval_negatives},
      {"top_k", e.top_k},
      {"aggregation", AggregationName(e.aggregation)},
      {"backbone", BackboneName(e.backbone)},
      {"hidden_sizes", e.hidden_sizes},
      {"normalization", NormalizationName(e.normalization)},
      {"graph_update_every", e.graph_update_every},
      {"seed", e.seed},
      {"timing", e.record_timing},
      {"data", run.data_path},
      {"out", run.out_dir},
      {"workers", run.workers},
      {"dump_graph", run.dump_graph},
  };
}

}  // namespace

std::string MetricsCsv(const ExperimentReport& report) {
  std::string out =
      "round,eta,val_hr10,val_ndcg10,test_hr10,test_ndcg10,mean_client_loss,"
      "graph_edges,wall_ms\n";
  for (const EtaRun& run : report.runs) {
    for (const RoundMetrics& m : run.rounds) {
      fmt::format_to(std::back_inserter(out),
                     "{},{:g},{:.4f},{:.4f},{:.4f},{:.4f},{:.6f},{},{:.1f}\n",
                            m.round, m.eta, m.validation.hr, m.validation.ndcg,
                            m.test.hr, m.test.ndcg, m.mean_client_loss,
                            m.graph_edges, m.wall_ms);
    }
  }
  return out;
}

std::string ReportJson(const ExperimentReport& report, const RunConfig& run) {
  RunConfig echoed = run;
  echoed.experiment = report.config;
  ordered_json per_rate = ordered_json::array();
  for (const EtaRun& r : report.runs) {
    if (r.diverged) {
      per_rate.push_back({{"eta", r.eta},
                          {"diverged", true},
                          {"rounds_completed", r.rounds.size()},
                          {"error", r.error}});
      continue;
    }
    per_rate.push_back({{"eta", r.eta},
                        {"diverged", false},
                        {"best_round", r.best().round},
                        {"validation", MetricsJson(r.best().validation)},
                        {"test", MetricsJson(r.best().test)}});
  }
  const EtaRun& best = report.best();
  const ordered_json doc = {
      {"format", "fedrec-report/1"},
      {"seed", report.config.seed},
      {"config", ConfigJson(echoed)},
      {"selected_eta", best.eta},
      {"best_round", best.best().round},
      {"validation", MetricsJson(best.best().validation)},
      {"test", MetricsJson(best.best().test)},
      {"eta_runs", std::move(per_rate)},
  };
  return doc.dump(2) + "\n";
}

SweepRow SummarizeRun(std::string_view parameter, std::string_view value,
                      const ExperimentReport& report) {
  const EtaRun& best = report.best();
  return {std::string(parameter), std::string(value), best.eta,
          best.best().round, best.best().validation, best.best().test};
}

std::string SweepSummaryCsv(const std::vector<SweepRow>& rows) {
  std::string out =
      "parameter,value,eta,best_round,val_hr10,val_ndcg10,test_hr10,"
      "test_ndcg10\n";
  for (const SweepRow& row : rows) {
    fmt::format_to(std::back_inserter(out),
                   "{},{},{:g},{},{:.4f},{:.4f},{:.4f},{:.4f}\n",
                          row.parameter, row.value, row.eta, row.best_round,
                          row.validation.hr, row.validation.ndcg, row.test.hr,
                          row.test.ndcg);
  }
  return out;
}

absl::Status WriteTextFile(const std::filesystem::path& path,
                           std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      return absl::InternalError(StrCat(
          "cannot create '", path.parent_path().string(), "': ", ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) {
    return absl::InternalError(
        StrCat("cannot write '", path.string(), "'"));
  }
  return absl::OkStatus();
}

}  // namespace fedrec
