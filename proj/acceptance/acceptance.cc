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

// End-to-end acceptance checks. Prints one PASS or FAIL line per criterion
// and exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "activetest/dataset.h"
#include "activetest/estimator.h"
#include "activetest/io.h"
#include "activetest/metrics.h"
#include "activetest/random.h"
#include "activetest/simulation.h"
#include "activetest/vetting.h"

namespace activetest {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Format(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

// Exact posterior by enumerating z in {0,1} in extended precision.
long double BrutePosterior(Label y, double prior, const NoiseRates& rates) {
  long double joint[2];
  for (int z = 0; z < 2; ++z) {
    const long double p_y1 = z == 1 ? rates.y1_given_z1 : rates.y1_given_z0;
    const long double likelihood = y == 1 ? p_y1 : 1.0L - p_y1;
    const long double p_z =
        z == 1 ? prior : 1.0L - static_cast<long double>(prior);
    joint[z] = likelihood * p_z;
  }
  return joint[1] / (joint[0] + joint[1]);
}

Outcome PosteriorCorrectness() {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    PosteriorModel model;
    NoiseRates rates;
    rates.y1_given_z1 = 0.01 + 0.98 * rng.Uniform();
    rates.y1_given_z0 = 0.01 + 0.98 * rng.Uniform();
    model.noise.per_relation = {rates};
    ScoreCalibrator calibrator;
    calibrator.weight = 4.0 * rng.Uniform() - 1.0;
    calibrator.bias = 6.0 * rng.Uniform() - 3.0;
    model.calibrators = {calibrator};
    const double score = 0.001 + 0.998 * rng.Uniform();
    const Label y = rng.Bernoulli(0.5) ? 1 : 0;
    const double got = PosteriorCell(y, score, 0, model);
    const long double want = BrutePosterior(y, calibrator.Prior(score), rates);
    worst = std::max(worst, static_cast<double>(std::fabs(got - want)));
  }
  return {worst <= 1e-12, Format("1000 triples, max |error| %.3g", worst)};
}

Outcome MemcClosedForm() {
  double worst = 0.0;
  for (std::size_t k : {1u, 10u, 100u}) {
    for (int i = 0; i <= 100; ++i) {
      const long double q = i / 100.0L;
      // Vetting reveals z = 1 with probability q, moving the top-K sum from
      // q to z, so P@K moves by |z - q| / K.
      const long double brute =
          q * std::fabs(1.0L - q) / k + (1.0L - q) * std::fabs(0.0L - q) / k;
      worst = std::max(worst, static_cast<double>(std::fabs(
                                  MemcPriority(static_cast<double>(q), k) -
                                  brute)));
    }
  }
  return {worst <= 1e-12, Format("101 q x 3 K, max |error| %.3g", worst)};
}

Outcome FullVettingExactness() {
  SyntheticConfig data;
  data.n_pairs = 5000;
  data.relations = 10;
  data.seed = 7;
  const auto dataset =
      std::make_shared<const PredictionDataset>(Generate(data));
  ActiveTestingConfig config;
  config.batch_size = 1000;
  config.budget = 5000;
  config.ks = {100, 1000, 10000};
  config.initial = {InitialPolicyKind::kRandom, 0};
  OracleAnnotator annotator;
  const EvaluationReport report = RunActiveTesting(dataset, config, annotator);
  const MetricReport& oracle = *report.oracle;
  double worst = 0.0;
  for (std::size_t i = 0; i < config.ks.size(); ++i) {
    worst = std::max(worst, std::fabs(report.expected.p_at_k[i] -
                                      oracle.p_at_k[i]));
    worst = std::max(worst, std::fabs(report.expected.r_at_k[i] -
                                      oracle.r_at_k[i]));
  }
  bool curves_match =
      report.expected.curve.points.size() == oracle.curve.points.size();
  for (std::size_t i = 0; curves_match && i < oracle.curve.points.size();
       ++i) {
    worst = std::max(worst, std::fabs(report.expected.curve.points[i].recall -
                                      oracle.curve.points[i].recall));
    worst = std::max(worst,
                     std::fabs(report.expected.curve.points[i].precision -
                               oracle.curve.points[i].precision));
  }
  return {curves_match && worst <= 1e-12 &&
              report.expected.p_at_k == oracle.p_at_k,
          Format("5000 pairs x 10 relations, max |E - oracle| %.3g", worst)};
}

Outcome CalibratorGradientCheck() {
  Rng rng(202);
  double worst = 0.0;
  for (int d = 0; d < 5; ++d) {
    const std::size_t n = 50 + rng.Below(400);
    std::vector<double> features(n), targets(n);
    const double true_weight = 3.0 * rng.Uniform();
    for (std::size_t i = 0; i < n; ++i) {
      features[i] = Logit(0.001 + 0.998 * rng.Uniform());
      targets[i] = rng.Bernoulli(Sigmoid(true_weight * features[i] - 1.0));
    }
    const LogisticObjective objective(features, targets, 1.0);
    for (int p = 0; p < 10; ++p) {
      const double w = 6.0 * rng.Uniform() - 3.0;
      const double b = 6.0 * rng.Uniform() - 3.0;
      const auto [gw, gb] = objective.Gradient(w, b);
      const double h = 1e-5;
      const double fw = (objective.Value(w + h, b) -
                         objective.Value(w - h, b)) / (2 * h);
      const double fb = (objective.Value(w, b + h) -
                         objective.Value(w, b - h)) / (2 * h);
      const double error = std::hypot(gw - fw, gb - fb) /
                           std::max(std::hypot(gw, gb), 1e-8);
      worst = std::max(worst, error);
    }
  }
  return {worst < 1e-4,
          Format("5 datasets x 10 points, max relative error %.3g", worst)};
}

Outcome ExpectedMetricMonteCarlo() {
  Rng rng(303);
  int inside = 0;
  double worst_z = 0.0;
  const int kInstances = 50;
  const int kSamples = 1000;
  for (int instance = 0; instance < kInstances; ++instance) {
    SyntheticConfig data;
    data.relations = 1 + rng.Below(2);
    data.n_pairs = 2 + rng.Below(20 / data.relations - 1);
    data.positive_rate = 0.5;
    data.seed = 1000 + instance;
    const PredictionDataset dataset = Generate(data);
    const RankedList ranking = FlattenAndRank(dataset);
    VettedLabels vetted;
    for (const EntityPair& pair : dataset.pairs()) {
      if (rng.Bernoulli(0.3)) vetted[pair.pair_id] = *pair.oracle_labels;
    }
    const PosteriorModel model = FitPosteriorModel(dataset, vetted);
    const PosteriorTable table = EstimateAll(dataset, ranking, vetted, model);
    const std::size_t k = 1 + rng.Below(table.q.size());
    const double expected = ExpectedMetrics(table, {k}).p_at_k[0];

    double variance = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      variance += table.q[i] * (1.0 - table.q[i]);
    }
    variance /= static_cast<double>(k * k);
    double mean = 0.0;
    std::vector<double> world(table.q.size());
    for (int s = 0; s < kSamples; ++s) {
      for (std::size_t i = 0; i < world.size(); ++i) {
        world[i] = rng.Bernoulli(table.q[i]) ? 1.0 : 0.0;
      }
      mean += PrecisionAtK(world, k);
    }
    mean /= kSamples;
    const double standard_error = std::sqrt(variance / kSamples);
    if (standard_error == 0.0) {
      inside += mean == expected;
      continue;
    }
    const double z = std::fabs(mean - expected) / standard_error;
    worst_z = std::max(worst_z, z);
    inside += z <= 3.0;
  }
  return {inside == kInstances,
          Format("%d/%d instances within 3 SE, max %.2f SE", inside,
                 kInstances, worst_z)};
}

// Runs of both strategies on the shared synthetic profile.
struct StrategyRuns {
  std::vector<EvaluationReport> memc;
  std::vector<EvaluationReport> random;
};

constexpr int kSeeds = 20;

const StrategyRuns& ProfileRuns() {
  static const StrategyRuns runs = [] {
    StrategyRuns result;
    for (int s = 0; s < kSeeds; ++s) {
      SyntheticConfig data;
      data.seed = 1 + s;
      const auto dataset =
          std::make_shared<const PredictionDataset>(Generate(data));
      ActiveTestingConfig config;
      config.ks = {50, 100, 150};
      config.batch_size = 20;
      config.budget = 100;
      config.initial = {InitialPolicyKind::kNoisyPositives, 150};
      config.seed = 1 + s;
      for (Strategy strategy : {Strategy::kMemc, Strategy::kRandom}) {
        config.strategy = strategy;
        OracleAnnotator annotator;
        (strategy == Strategy::kMemc ? result.memc : result.random)
            .push_back(RunActiveTesting(dataset, config, annotator));
      }
    }
    return result;
  }();
  return runs;
}

Outcome BiasPattern() {
  int underestimates = 0;
  int corrected = 0;
  for (const EvaluationReport& report : ProfileRuns().memc) {
    bool under = true;
    bool better = true;
    for (std::size_t i = 0; i < report.ks.size(); ++i) {
      const double oracle = report.oracle->p_at_k[i];
      under &= report.held_out.p_at_k[i] < oracle;
      better &= std::fabs(report.expected.p_at_k[i] - oracle) <
                std::fabs(report.held_out.p_at_k[i] - oracle);
    }
    underestimates += under;
    corrected += better;
  }
  return {underestimates >= 18 && corrected >= 18,
          Format("held-out below oracle in %d/%d seeds, MEMC closer at all K "
                 "in %d/%d seeds",
                 underestimates, kSeeds, corrected, kSeeds)};
}

double MeanDistance(const std::vector<EvaluationReport>& reports) {
  double sum = 0.0;
  for (const EvaluationReport& report : reports) {
    sum += *report.expected_distance;
  }
  return sum / reports.size();
}

Outcome StrategyOrdering() {
  const double memc = MeanDistance(ProfileRuns().memc);
  const double random = MeanDistance(ProfileRuns().random);
  return {memc < random,
          Format("mean distance MEMC %.4f, random %.4f (runs shared with "
                 "bias-pattern)",
                 memc, random)};
}

Outcome IterationTrace() {
  std::vector<double> trace(5, 0.0);
  for (const EvaluationReport& report : ProfileRuns().memc) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      trace[i] += *report.iterations[i].reference_distance / kSeeds;
    }
  }
  bool monotone = true;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    monotone &= trace[i] <= trace[i - 1];
  }
  return {monotone,
          Format("budgets 20..100: %.4f %.4f %.4f %.4f %.4f (runs shared "
                 "with bias-pattern)",
                 trace[0], trace[1], trace[2], trace[3], trace[4])};
}

Outcome DeterminismAndPersistence() {
  SyntheticConfig data;
  data.seed = 11;
  const auto dataset =
      std::make_shared<const PredictionDataset>(Generate(data));
  ActiveTestingConfig config;
  config.initial = {InitialPolicyKind::kRandom, 50};
  config.seed = 5;

  const auto uninterrupted = [&] {
    ActiveTestingSession session = ActiveTestingSession::Start(dataset, config);
    OracleAnnotator annotator;
    while (!session.done()) session.Step(annotator);
    return session;
  };
  const ActiveTestingSession first = uninterrupted();
  const ActiveTestingSession second = uninterrupted();

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "activetest-acceptance";
  std::filesystem::create_directories(dir);
  const std::string dataset_path = (dir / "data.jsonl").string();
  const std::string session_path = (dir / "session.json").string();
  SaveDataset(*dataset, dataset_path);
  {
    ActiveTestingSession session = ActiveTestingSession::Start(dataset, config);
    OracleAnnotator annotator;
    // Seed batch, then two of the five regular batches.
    for (int i = 0; i < 3; ++i) session.Step(annotator);
    SaveSession({{dataset_path, HashFile(dataset_path)}, session.Snapshot()},
                session_path);
  }
  ResumedSession resumed = ResumeSession(session_path);
  OracleAnnotator annotator;
  while (!resumed.session.done()) resumed.session.Step(annotator);
  std::filesystem::remove_all(dir);

  const bool deterministic = first.Snapshot() == second.Snapshot();
  const bool same_records =
      resumed.session.state().history == first.state().history &&
      resumed.session.state().seed == first.state().seed;
  const bool same_final = resumed.session.Snapshot() == first.Snapshot() &&
                          resumed.session.Report(true) == first.Report(true);
  return {deterministic && same_records && same_final,
          Format("%zu records, repeat run identical: %s, resumed run "
                 "identical: %s",
                 first.state().history.size(), deterministic ? "yes" : "no",
                 same_records && same_final ? "yes" : "no")};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
  double time_limit_seconds;  // 0 means no limit.
};

int RunAll() {
  const std::vector<Criterion> criteria = {
      {"posterior-correctness", PosteriorCorrectness, 1.0},
      {"memc-closed-form", MemcClosedForm, 1.0},
      {"full-vetting-exactness", FullVettingExactness, 10.0},
      {"calibrator-gradient-check", CalibratorGradientCheck, 0.0},
      {"expected-metric-monte-carlo", ExpectedMetricMonteCarlo, 0.0},
      {"bias-pattern", BiasPattern, 120.0},
      {"strategy-ordering", StrategyOrdering, 180.0},
      {"iteration-trace", IterationTrace, 180.0},
      {"determinism-and-persistence", DeterminismAndPersistence, 0.0},
  };
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    if (criterion.time_limit_seconds > 0 &&
        seconds >= criterion.time_limit_seconds) {
      outcome.pass = false;
      outcome.detail += Format("; over the %.0f s limit",
                               criterion.time_limit_seconds);
    }
    std::printf("%s %s (%.2f s): %s\n", outcome.pass ? "PASS" : "FAIL",
                criterion.name, seconds, outcome.detail.c_str());
    std::fflush(stdout);
    failures += !outcome.pass;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}

}  // namespace
}  // namespace activetest

int main() { return activetest::RunAll(); }
