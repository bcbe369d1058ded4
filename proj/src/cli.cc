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
#include "fedrec/cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "fedrec/fedsim.h"
#include "fedrec/report.h"
#include "fmt/format.h"
#include "fmt/ranges.h"
#include "json.hpp"
#include "str_util.h"

namespace fedrec {
namespace {

namespace fs = std::filesystem;

std::string DefaultOutDir() {
  const char* env = std::getenv("GPFEDREC_OUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : "out";
}

std::string Kebab(std::string_view key) {
  std::string out(key);
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

absl::Status CheckManifest(const InteractionDataset& data,
                           const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    return absl::NotFoundError(
        StrCat("cannot open '", manifest_path.string(), "'"));
  }
  nlohmann::json doc;
  try {
    in >> doc;
    const auto& users = doc.at("users");
    if (doc.at("n_users").get<int64_t>() != data.n_users() ||
        doc.at("n_items").get<int64_t>() != data.n_items() ||
        static_cast<int64_t>(users.size()) != data.n_users()) {
      return absl::FailedPreconditionError(StrCat(
          manifest_path.string(), " does not match the dataset shape"));
    }
    for (const auto& entry : users) {
      const auto user = entry.at("user").get<UserId>();
      if (user < 0 || user >= data.n_users() ||
          entry.at("validation").get<ItemId>() != data.validation(user) ||
          entry.at("test").get<ItemId>() != data.test(user)) {
        return absl::FailedPreconditionError(StrCat(
            manifest_path.string(), ": held-out items of user ", user,
            " differ from the dataset"));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        StrCat(manifest_path.string(), ": ", e.what()));
  }
  return absl::OkStatus();
}

// Registers one string flag per config key on `command`. A repeated flag
// keeps its last value, so wrappers can append overrides.
void AddConfigFlags(CLI::App* command,
                    std::map<std::string, std::string>& values) {
  // Help text shows each key's default, read back from the rendered config.
  std::map<std::string, std::string> defaults;
  RunConfig fallback;
  fallback.out_dir = DefaultOutDir();
  const std::string text = ConfigToText(fallback);
  for (std::string_view line : StrSplit(text, "\n")) {
    const size_t eq = line.find(" = ");
    if (eq == std::string_view::npos) continue;
    defaults[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 3));
  }
  for (const std::string& key : ConfigKeys()) {
    const std::string& shown = defaults[key];
    command
        ->add_option("--" + Kebab(key), values[key],
                     fmt::format("config key {} (default: {})", key,
                                 shown.empty() ? "unset" : shown))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
}

absl::StatusOr<RunConfig> ResolveConfig(
    const CLI::App* command, const std::string& config_path,
    const std::map<std::string, std::string>& values) {
  RunConfig run;
  run.out_dir = DefaultOutDir();
  if (!config_path.empty()) {
    if (absl::Status s = ApplyConfigFile(run, config_path); !s.ok()) return s;
  }
  for (const auto& [key, value] : values) {
    if (command->count("--" + Kebab(key)) == 0) continue;
    if (absl::Status s = ApplySetting(run, key, value); !s.ok()) return s;
  }
  // A single learning rate given on the command line replaces any grid.
  if (command->count("--eta") > 0 && command->count("--eta-grid") == 0) {
    run.experiment.eta_grid.clear();
  }
  if (absl::Status s = run.experiment.Validate(); !s.ok()) return s;
  if (run.data_path.empty()) {
    return absl::InvalidArgumentError("no dataset given (use --data)");
  }
  return run;
}

ExperimentObserver ProgressObserver(const RunConfig& run, std::ostream& err,
                                    std::string prefix) {
  ExperimentObserver observer;
  const int rounds = run.experiment.rounds;
  observer.on_round = [&err, rounds, prefix](const RoundMetrics& m) {
    err << fmt::format(
        "{}eta {:g} round {}/{}: val HR@10 {:.2f} NDCG@10 {:.2f}, "
        "loss {:.4f}, {} edges\n",
        prefix, m.eta, m.round, rounds, m.validation.hr, m.validation.ndcg,
        m.mean_client_loss, m.graph_edges);
  };
  if (run.dump_graph) {
    const fs::path dir = run.out_dir;
    observer.on_graph = [dir, &err](int round, const UserGraph& graph) {
      const absl::Status s = WriteTextFile(
          dir / StrCat("graph_round_", round, ".json"),
          GraphRoundJson(graph, round));
      if (!s.ok()) err << "warning: " << s.message() << "\n";
    };
  }
  return observer;
}

absl::StatusOr<ExperimentReport> TrainAndWrite(const InteractionDataset& data,
                                               const RunConfig& run,
                                               std::ostream& err,
                                               std::string prefix) {
  auto report = RunExperiment(data, run.experiment, run.workers,
                              ProgressObserver(run, err, std::move(prefix)));
  if (!report.ok()) return report.status();
  const fs::path dir = run.out_dir;
  if (absl::Status s = WriteTextFile(dir / "metrics.csv", MetricsCsv(*report));
      !s.ok()) {
    return s;
  }
  if (absl::Status s =
          WriteTextFile(dir / "report.json", ReportJson(*report, run));
      !s.ok()) {
    return s;
  }
  return report;
}

int Fail(std::ostream& err, const absl::Status& status) {
  err << "error: " << status.message() << "\n";
  return 1;
}

int Prepare(const std::string& input, const std::string& format_name,
            int min_interactions, uint64_t seed, const std::string& out_dir,
            std::ostream& out, std::ostream& err) {
  auto format = ParseRawFormat(format_name);
  if (!format.ok()) return Fail(err, format.status());
  auto records = LoadRaw(input, *format);
  if (!records.ok()) return Fail(err, records.status());
  auto canonical = Canonicalize(*records, min_interactions);
  if (!canonical.ok()) return Fail(err, canonical.status());
  auto split = SplitLeaveOneOut(*canonical);
  if (!split.ok()) return Fail(err, split.status());

  std::ostringstream csv;
  if (absl::Status s = WriteCanonicalCsv(*canonical, csv); !s.ok()) {
    return Fail(err, s);
  }
  const fs::path dir = out_dir;
  if (absl::Status s = WriteTextFile(dir / "dataset.csv", csv.str()); !s.ok()) {
    return Fail(err, s);
  }
  if (absl::Status s =
          WriteTextFile(dir / "split.json", SplitManifestJson(*split, seed));
      !s.ok()) {
    return Fail(err, s);
  }
  const double cells = static_cast<double>(canonical->n_users) *
                       static_cast<double>(canonical->n_items);
  const double sparsity =
      100.0 * (1.0 - static_cast<double>(canonical->records.size()) / cells);
  out << fmt::format("{} users, {} items, {} interactions, sparsity {:.2f}%\n",
                     canonical->n_users, canonical->n_items,
                     canonical->records.size(), sparsity);
  return 0;
}

void PrintBest(const ExperimentReport& report, std::ostream& out) {
  const EtaRun& best = report.best();
  out << fmt::format(
      "best round {} (eta {:g}): test HR@10 = {:.4f}, NDCG@10 = {:.4f}\n",
      best.best().round, best.eta, best.best().test.hr, best.best().test.ndcg);
}

}  // namespace

const std::vector<std::string>& SweepParameters() {
  static const auto* names = new std::vector<std::string>{
      "gamma", "lambda", "eta", "d", "delta", "graph_update_every"};
  return *names;
}

absl::StatusOr<InteractionDataset> LoadPreparedDataset(const std::string& path) {
  auto canonical = ReadCanonicalCsv(path);
  if (!canonical.ok()) return canonical.status();
  auto split = SplitLeaveOneOut(*canonical);
  if (!split.ok()) return split.status();
  const fs::path manifest = fs::path(path).parent_path() / "split.json";
  if (fs::exists(manifest)) {
    if (absl::Status s = CheckManifest(*split, manifest); !s.ok()) return s;
  }
  return split;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Graph-guided personalized federated recommendation simulator",
               "fedrec"};
  app.require_subcommand(1);

  CLI::App* prepare = app.add_subcommand(
      "prepare", "Canonicalize a raw ratings file and write its split");
  std::string input;
  std::string format = "tab_separated";
  int min_interactions = 0;
  uint64_t prepare_seed = 42;
  std::string prepare_out = DefaultOutDir();
  prepare->add_option("--input", input, "Raw ratings file")->required();
  prepare->add_option("--format", format,
                      "tab_separated | double_colon | csv")
      ->capture_default_str();
  prepare->add_option("--min-interactions", min_interactions,
                      "Drop users with fewer records")
      ->capture_default_str();
  prepare->add_option("--seed", prepare_seed, "Seed recorded in split.json")
      ->capture_default_str();
  prepare->add_option("--out", prepare_out, "Output directory")
      ->capture_default_str();

  CLI::App* train = app.add_subcommand("train", "Run one experiment");
  std::string train_config;
  std::map<std::string, std::string> train_values;
  train->add_option("--config", train_config, "key = value config file");
  AddConfigFlags(train, train_values);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Run one experiment per parameter value");
  std::string sweep_config;
  std::string parameter;
  std::string value_list;
  std::map<std::string, std::string> sweep_values;
  sweep->add_option("--config", sweep_config, "key = value config file");
  sweep->add_option("--param", parameter,
                    StrCat("One of ", fmt::format("{}", fmt::join(SweepParameters(), ", "))))
      ->required();
  sweep->add_option("--values", value_list, "Comma-separated values")
      ->required();
  AddConfigFlags(sweep, sweep_values);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  if (prepare->parsed()) {
    return Prepare(input, format, min_interactions, prepare_seed, prepare_out,
                   out, err);
  }

  if (train->parsed()) {
    auto run = ResolveConfig(train, train_config, train_values);
    if (!run.ok()) return Fail(err, run.status());
    auto data = LoadPreparedDataset(run->data_path);
    if (!data.ok()) return Fail(err, data.status());
    auto report = TrainAndWrite(*data, *run, err, "");
    if (!report.ok()) return Fail(err, report.status());
    PrintBest(*report, out);
    return 0;
  }

  // sweep
  const auto& names = SweepParameters();
  if (std::find(names.begin(), names.end(), parameter) == names.end()) {
    return Fail(err, absl::InvalidArgumentError(StrCat(
                         "unknown sweep parameter '", parameter,
                         "'; valid: ", fmt::format("{}", fmt::join(names, ", ")))));
  }
  std::vector<std::string> values;
  for (std::string_view v : SplitList(value_list, ',')) {
    values.emplace_back(v);
  }
  if (values.empty()) {
    return Fail(err, absl::InvalidArgumentError("empty sweep value list"));
  }
  auto base = ResolveConfig(sweep, sweep_config, sweep_values);
  if (!base.ok()) return Fail(err, base.status());
  auto data = LoadPreparedDataset(base->data_path);
  if (!data.ok()) return Fail(err, data.status());

  std::vector<SweepRow> rows;
  for (const std::string& value : values) {
    RunConfig run = *base;
    if (absl::Status s = ApplySetting(run, parameter, value); !s.ok()) {
      return Fail(err, s);
    }
    if (parameter == "eta") run.experiment.eta_grid.clear();
    if (absl::Status s = run.experiment.Validate(); !s.ok()) {
      return Fail(err, s);
    }
    run.out_dir = (fs::path(base->out_dir) / StrCat(parameter, "_", value))
                      .string();
    auto report = TrainAndWrite(*data, run, err,
                                StrCat(parameter, "=", value, " "));
    if (!report.ok()) return Fail(err, report.status());
    rows.push_back(SummarizeRun(parameter, value, *report));
    out << parameter << "=" << value << ": ";
    PrintBest(*report, out);
  }
  if (absl::Status s = WriteTextFile(fs::path(base->out_dir) / "sweep_summary.csv",
                                     SweepSummaryCsv(rows));
      !s.ok()) {
    return Fail(err, s);
  }
  return 0;
}

}  // namespace fedrec
