/*
 * Copyright 2026 The activetest Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "activetest/errors.h"
#include "activetest/estimator.h"
#include "activetest/io.h"
#include "activetest/server.h"
#include "activetest/simulation.h"
#include "activetest/vetting.h"

namespace activetest::cli {
namespace {

using nlohmann::json;

void Emit(const std::string& path, const std::string& content,
          std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    WriteFileAtomically(path, content);
  }
}

json ReadJsonFile(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string AbsolutePath(const std::string& path) {
  return std::filesystem::absolute(path).lexically_normal().string();
}

void PrintBatchSummary(const ActiveTestingSession& session,
                       std::ostream& out) {
  const VettingState& state = session.state();
  if (const PendingBatch* batch = session.pending()) {
    out << "pending " << batch->batch_id << " (" << batch->pairs.size()
        << " pairs" << (batch->initial ? ", initial" : "") << "), budget "
        << state.budget_remaining << "/" << state.initial_budget << '\n';
  } else {
    out << "done, " << state.vetted.size() << " pairs vetted\n";
  }
}

struct SimulateArgs {
  SyntheticConfig config;
  std::string out;
};

void Simulate(const SimulateArgs& args, std::ostream& out) {
  GenerationStats stats;
  const PredictionDataset dataset = Generate(args.config, &stats);
  SaveDataset(dataset, args.out);
  out << "wrote " << dataset.num_pairs() << " pairs x "
      << dataset.num_relations() << " relations to " << args.out
      << "; positive pairs " << stats.positive_pairs
      << ", false-negative cell rate " << stats.CellFalseNegativeRate()
      << '\n';
}

struct EvaluateArgs {
  std::string dataset;
  std::string session;
  std::vector<std::size_t> ks;
  std::string format = "json";
  std::string out;
};

void Evaluate(const EvaluateArgs& args, std::ostream& out) {
  if (args.dataset.empty() && args.session.empty()) {
    throw ValidationError("evaluate needs --dataset or --session");
  }
  const ReportFormat format = ParseReportFormat(args.format);
  std::shared_ptr<const PredictionDataset> dataset;
  VettedLabels vetted;
  EstimatorOptions options;
  std::vector<std::size_t> ks = {100, 200, 300};
  EvaluationReport report;
  if (!args.session.empty()) {
    ResumedSession resumed = ResumeSession(args.session, args.dataset);
    dataset = resumed.dataset;
    const ActiveTestingSession& session = resumed.session;
    vetted = session.state().vetted;
    options = session.config().estimator;
    ks = session.config().ks;
    report.seed = session.state().seed;
    report.iterations = session.state().history;
  } else {
    dataset = std::make_shared<const PredictionDataset>(
        LoadDataset(args.dataset));
  }
  if (!args.ks.empty()) ks = args.ks;

  const RankedList ranking = FlattenAndRank(*dataset);
  const PosteriorModel model = FitPosteriorModel(*dataset, vetted, options);
  const PosteriorTable posteriors =
      EstimateAll(*dataset, ranking, vetted, model);
  report.ks = ks;
  report.expected = ExpectedMetrics(posteriors, ks);
  report.held_out =
      SafeMetrics(LabelVector(*dataset, ranking, LabelSource::kNoisy), ks,
                  MetricSource::kHeldOut);
  if (dataset->has_oracle()) {
    report.oracle =
        SafeMetrics(LabelVector(*dataset, ranking, LabelSource::kOracle), ks,
                    MetricSource::kOracle);
    const PrCurve& reference = report.oracle->curve;
    if (!reference.points.empty()) {
      report.expected_distance =
          CurveDistance(report.expected.curve, reference);
      if (!report.held_out.curve.points.empty()) {
        report.held_out_distance =
            CurveDistance(report.held_out.curve, reference);
      }
    }
  }
  Emit(args.out, EmitReport(report, format), out);
}

struct RunArgs {
  std::string dataset;
  std::string config;
  std::string strategy;
  std::string aggregation;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> budget;
  std::vector<std::size_t> ks;
  std::string init_policy;
  std::optional<std::size_t> init_count;
  std::optional<std::uint64_t> seed;
  std::string session_out;
  std::string report_out;
  std::string format = "json";
  bool external = false;
};

ActiveTestingConfig BuildRunConfig(const RunArgs& args) {
  ActiveTestingConfig config;
  if (!args.config.empty()) config = ConfigFromJson(ReadJsonFile(args.config));
  if (!args.strategy.empty()) config.strategy = ParseStrategy(args.strategy);
  if (!args.aggregation.empty()) {
    config.aggregation = ParseAggregation(args.aggregation);
  }
  if (args.batch_size) config.batch_size = *args.batch_size;
  if (args.budget) config.budget = *args.budget;
  if (!args.ks.empty()) config.ks = args.ks;
  if (!args.init_policy.empty()) {
    config.initial.kind = ParseInitialPolicy(args.init_policy);
  }
  if (args.init_count) config.initial.count = *args.init_count;
  if (args.seed) config.seed = *args.seed;
  return config;
}

void RunLoop(const RunArgs& args, std::ostream& out) {
  const ActiveTestingConfig config = BuildRunConfig(args);
  const ReportFormat format = ParseReportFormat(args.format);
  if (args.external && args.session_out.empty()) {
    throw ValidationError("--external needs --session-out");
  }
  const DatasetRef ref{AbsolutePath(args.dataset), HashFile(args.dataset)};
  auto dataset =
      std::make_shared<const PredictionDataset>(LoadDataset(args.dataset));
  ActiveTestingSession session = ActiveTestingSession::Start(dataset, config);
  if (args.external) {
    SaveSession({ref, session.Snapshot()}, args.session_out);
    PrintBatchSummary(session, out);
    return;
  }
  if (!dataset->has_oracle()) {
    throw ValidationError(
        "dataset has no oracle labels; use --external and vet the batches");
  }
  OracleAnnotator annotator;
  const EvaluationReport report = RunToCompletion(session, annotator);
  if (!args.session_out.empty()) {
    SaveSession({ref, session.Snapshot()}, args.session_out);
  }
  const std::string text = EmitReport(report, format);
  if (args.report_out.empty()) {
    out << text;
  } else {
    WriteFileAtomically(args.report_out, text);
    out << "vetted " << session.state().vetted.size() << " pairs in "
        << annotator.calls() << " batches";
    if (report.expected_distance) {
      out << "; expected-vs-oracle distance "
          << FormatNumber(*report.expected_distance);
    }
    out << '\n';
  }
}

struct SelectArgs {
  std::string session;
  std::string dataset;
  std::optional<std::size_t> batch_size;
  std::string out;
};

void Select(const SelectArgs& args, std::ostream& out) {
  ResumedSession resumed = ResumeSession(args.session, args.dataset);
  ActiveTestingSession& session = resumed.session;
  if (args.batch_size) {
    const PendingBatch* pending = session.pending();
    if (pending && !pending->initial &&
        pending->pairs.size() != *args.batch_size) {
      session.Reselect(*args.batch_size);
      SaveSession({resumed.dataset_ref, session.Snapshot()}, args.session);
    }
  }
  const PendingBatch* pending = session.pending();
  json view = pending ? BatchView(session.dataset(), *pending) : json(nullptr);
  Emit(args.out, view.dump(1) + "\n", out);
}

struct VetArgs {
  std::string session;
  std::string dataset;
  std::string labels;
};

void Vet(const VetArgs& args, std::ostream& out) {
  ResumedSession resumed = ResumeSession(args.session, args.dataset);
  BatchLabels labels;
  const std::string batch_id =
      ParseBatchLabels(ReadJsonFile(args.labels), *resumed.dataset, &labels);
  resumed.session.Submit(batch_id, labels);
  SaveSession({resumed.dataset_ref, resumed.session.Snapshot()}, args.session);
  out << "accepted " << batch_id << "; ";
  PrintBatchSummary(resumed.session, out);
}

struct CompareArgs {
  std::string config;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> threads;
  std::string format = "json";
  std::string out;
};

void Compare(const CompareArgs& args, std::ostream& out) {
  ComparisonSpec spec;
  const ReportFormat format = ParseReportFormat(args.format);
  if (!args.config.empty()) {
    const json j = ReadJsonFile(args.config);
    try {
      if (j.contains("data")) spec.data = SyntheticConfigFromJson(j["data"]);
      if (j.contains("testing")) spec.testing = ConfigFromJson(j["testing"]);
      if (j.contains("strategies")) {
        spec.strategies.clear();
        for (const json& name : j["strategies"]) {
          spec.strategies.push_back(ParseStrategy(name.get<std::string>()));
        }
      }
      if (j.contains("budgets")) {
        spec.budgets = j["budgets"].get<std::vector<std::size_t>>();
      }
      spec.n_seeds = j.value("seeds", spec.n_seeds);
    } catch (const json::exception& e) {
      throw ValidationError("bad comparison config: " +
                            std::string(e.what()));
    }
  }
  if (args.seeds) spec.n_seeds = *args.seeds;
  if (args.threads) spec.threads = *args.threads;
  Emit(args.out, EmitComparison(CompareStrategies(spec), format), out);
}

struct ServeArgs {
  std::string session;
  std::string dataset;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui_dir;
};

void Serve(const ServeArgs& args, std::ostream& out) {
  std::unique_ptr<SessionService> service =
      SessionService::Open(args.session, args.dataset);
  AnnotationServer server(*service, args.ui_dir);
  const int port = server.Bind(args.host, args.port);
  out << "serving " << args.session << " on http://" << args.host << ":"
      << port << '\n'
      << std::flush;
  server.Listen();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Active testing of classifiers evaluated on noisy labels",
               "activetest"};
  app.require_subcommand(1);
  std::function<void()> action;

  SimulateArgs simulate;
  CLI::App* sim =
      app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim->add_option("--pairs", simulate.config.n_pairs, "Entity pairs")
      ->capture_default_str();
  sim->add_option("--relations", simulate.config.relations, "Relations")
      ->capture_default_str();
  sim->add_option("--positive-rate", simulate.config.positive_rate,
                  "Fraction of pairs holding a relation")
      ->capture_default_str();
  sim->add_option("--extra-rate", simulate.config.extra_relation_rate,
                  "Chance of each further relation on a positive pair")
      ->capture_default_str();
  sim->add_option("--fn-rate", simulate.config.false_negative_rate,
                  "Noisy-label false-negative rate per positive cell")
      ->capture_default_str();
  sim->add_option("--fp-rate", simulate.config.false_positive_rate,
                  "Noisy-label false-positive rate per negative cell")
      ->capture_default_str();
  sim->add_option("--seed", simulate.config.seed, "Generator seed")
      ->capture_default_str();
  sim->add_option("--out", simulate.out, "Output dataset file")->required();
  sim->callback([&] { action = [&] { Simulate(simulate, out); }; });

  EvaluateArgs evaluate;
  CLI::App* eval =
      app.add_subcommand("evaluate", "Held-out, expected and oracle metrics");
  eval->add_option("--dataset", evaluate.dataset, "Dataset file");
  eval->add_option("--session", evaluate.session,
                   "Session whose vetted labels inform the estimate");
  eval->add_option("--k", evaluate.ks, "Cut-offs, e.g. 100,200,300")
      ->delimiter(',');
  eval->add_option("--format", evaluate.format, "json or csv")
      ->capture_default_str();
  eval->add_option("--out", evaluate.out, "Output file (default stdout)");
  eval->callback([&] { action = [&] { Evaluate(evaluate, out); }; });

  RunArgs run;
  CLI::App* loop = app.add_subcommand(
      "run", "Run the vetting loop with the oracle annotator");
  loop->add_option("--dataset", run.dataset, "Dataset file")->required();
  loop->add_option("--config", run.config, "Loop configuration JSON");
  loop->add_option("--strategy", run.strategy, "memc or random");
  loop->add_option("--aggregation", run.aggregation, "max or sum");
  loop->add_option("--batch-size", run.batch_size, "Pairs per batch");
  loop->add_option("--budget", run.budget, "Pairs to vet");
  loop->add_option("--k", run.ks, "Cut-offs, e.g. 100,200,300")
      ->delimiter(',');
  loop->add_option("--init-policy", run.init_policy,
                   "random (count pairs) or noisy-positives (every noisy "
                   "positive plus count noisy negatives)");
  loop->add_option("--init-count", run.init_count,
                   "Pairs drawn by the initial policy");
  loop->add_option("--seed", run.seed, "Loop seed");
  loop->add_option("--session-out", run.session_out, "Session file to write");
  loop->add_option("--report-out", run.report_out,
                   "Report file (default stdout)");
  loop->add_option("--format", run.format, "json or csv")
      ->capture_default_str();
  loop->add_flag("--external", run.external,
                 "Stop at the first batch and save the session for external "
                 "annotation");
  loop->callback([&] { action = [&] { RunLoop(run, out); }; });

  SelectArgs select;
  CLI::App* sel =
      app.add_subcommand("select", "Emit the pending batch of a session");
  sel->add_option("--session", select.session, "Session file")->required();
  sel->add_option("--dataset", select.dataset, "Dataset file override");
  sel->add_option("--batch-size", select.batch_size,
                  "Reselect the pending batch with this size");
  sel->add_option("--out", select.out, "Output file (default stdout)");
  sel->callback([&] { action = [&] { Select(select, out); }; });

  VetArgs vet;
  CLI::App* vt =
      app.add_subcommand("vet", "Submit labels for the pending batch");
  vt->add_option("--session", vet.session, "Session file")->required();
  vt->add_option("--dataset", vet.dataset, "Dataset file override");
  vt->add_option("--labels", vet.labels,
                 "JSON {\"batch_id\": ..., \"labels\": {...}}")
      ->required();
  vt->callback([&] { action = [&] { Vet(vet, out); }; });

  CompareArgs compare;
  CLI::App* cmp = app.add_subcommand(
      "compare", "Compare strategies over synthetic datasets");
  cmp->add_option("--config", compare.config, "Comparison configuration JSON");
  cmp->add_option("--seeds", compare.seeds, "Number of seeds");
  cmp->add_option("--threads", compare.threads,
                  "Worker threads (default: hardware concurrency)");
  cmp->add_option("--format", compare.format, "json or csv")
      ->capture_default_str();
  cmp->add_option("--out", compare.out, "Output file (default stdout)");
  cmp->callback([&] { action = [&] { Compare(compare, out); }; });

  ServeArgs serve;
  CLI::App* srv =
      app.add_subcommand("serve", "Serve a session to human annotators");
  srv->add_option("--session", serve.session, "Session file")->required();
  srv->add_option("--dataset", serve.dataset, "Dataset file override");
  srv->add_option("--host", serve.host, "Bind address")->capture_default_str();
  srv->add_option("--port", serve.port, "Port")->capture_default_str();
  srv->add_option("--ui-dir", serve.ui_dir, "Static files for the UI");
  srv->callback([&] { action = [&] { Serve(serve, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    action();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace activetest::cli
