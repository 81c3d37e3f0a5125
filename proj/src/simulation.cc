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

#include "activetest/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include "activetest/errors.h"
#include "activetest/estimator.h"
#include "activetest/random.h"

namespace activetest {
namespace {

void CheckRate(double rate, const char* name) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0,1]");
  }
}

std::string PaddedId(const char* prefix, std::size_t index, std::size_t n) {
  const int width = std::max<int>(
      1, static_cast<int>(std::to_string(n == 0 ? 0 : n - 1).size()));
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%s%0*zu", prefix, width, index);
  return buffer;
}

}  // namespace

void ValidateSyntheticConfig(const SyntheticConfig& config) {
  if (config.n_pairs < 1) throw ValidationError("n_pairs must be at least 1");
  if (config.relations < 1) {
    throw ValidationError("relations must be at least 1");
  }
  CheckRate(config.positive_rate, "positive_rate");
  CheckRate(config.extra_relation_rate, "extra_relation_rate");
  CheckRate(config.false_negative_rate, "false_negative_rate");
  CheckRate(config.false_positive_rate, "false_positive_rate");
  if (!std::isfinite(config.score_base) ||
      !std::isfinite(config.score_signal) ||
      !(config.score_noise >= 0.0 && std::isfinite(config.score_noise))) {
    throw ValidationError("score model parameters must be finite");
  }
}

double GenerationStats::CellFalseNegativeRate() const {
  return positive_cells == 0
             ? 0.0
             : static_cast<double>(false_negative_cells) / positive_cells;
}

double GenerationStats::PairFalseNegativeRate(std::size_t n_pairs) const {
  return n_pairs == 0 ? 0.0
                      : static_cast<double>(false_negative_pairs) / n_pairs;
}

PredictionDataset Generate(const SyntheticConfig& config,
                           GenerationStats* stats) {
  ValidateSyntheticConfig(config);
  Rng rng(config.seed);
  const std::size_t p = config.relations;
  GenerationStats local;

  std::vector<std::string> relations;
  for (std::size_t k = 0; k < p; ++k) {
    relations.push_back(PaddedId("rel", k, p));
  }

  std::vector<EntityPair> pairs;
  pairs.reserve(config.n_pairs);
  for (std::size_t i = 0; i < config.n_pairs; ++i) {
    EntityPair pair;
    pair.pair_id = PaddedId("pair", i, config.n_pairs);
    pair.head = PaddedId("head", i, config.n_pairs);
    pair.tail = PaddedId("tail", i, config.n_pairs);
    pair.sentences = {pair.head + " was mentioned together with " + pair.tail +
                      "."};

    // The draw sequence is the same whatever the rates, so a zero-noise
    // config yields the same truth and scores as a noisy one.
    LabelRow truth(p, 0);
    const bool positive = rng.Bernoulli(config.positive_rate);
    const std::size_t first = rng.Below(p);
    for (std::size_t k = 0; k < p; ++k) {
      const bool extra = rng.Bernoulli(config.extra_relation_rate);
      if (positive && (k == first || extra)) truth[k] = 1;
    }

    LabelRow noisy(p, 0);
    pair.scores.resize(p);
    bool any_truth = false, any_noisy = false;
    for (std::size_t k = 0; k < p; ++k) {
      const double flip = rng.Uniform();
      const double noise = rng.Normal();
      if (truth[k]) {
        noisy[k] = flip < config.false_negative_rate ? 0 : 1;
        ++local.positive_cells;
        if (!noisy[k]) ++local.false_negative_cells;
      } else {
        noisy[k] = flip < config.false_positive_rate ? 1 : 0;
        ++local.negative_cells;
        if (noisy[k]) ++local.false_positive_cells;
      }
      const double logit = config.score_base + config.score_signal * truth[k] +
                           config.score_noise * noise;
      pair.scores[k] =
          std::clamp(Sigmoid(logit), kClampEpsilon, 1.0 - kClampEpsilon);
      any_truth |= truth[k] == 1;
      any_noisy |= noisy[k] == 1;
    }
    if (any_truth) {
      ++local.positive_pairs;
      if (!any_noisy) ++local.false_negative_pairs;
    }
    pair.noisy_labels = std::move(noisy);
    pair.oracle_labels = std::move(truth);
    pairs.push_back(std::move(pair));
  }
  if (stats != nullptr) *stats = local;
  return PredictionDataset(std::move(relations), std::move(pairs));
}

BatchLabels OracleAnnotator::Annotate(const PredictionDataset& dataset,
                                      const std::vector<std::string>& batch) {
  ++calls_;
  BatchLabels labels;
  for (const std::string& pair_id : batch) {
    const auto index = dataset.FindPair(pair_id);
    if (!index) throw AnnotatorError("unknown pair '" + pair_id + "'");
    const EntityPair& pair = dataset.pair(*index);
    if (!pair.oracle_labels) {
      throw AnnotatorError("no oracle labels for pair '" + pair_id + "'");
    }
    labels[pair_id] = *pair.oracle_labels;
  }
  return labels;
}

namespace {

std::vector<ComparisonRow> RunSeed(const ComparisonSpec& spec,
                                   std::uint64_t offset) {
  SyntheticConfig data = spec.data;
  data.seed = spec.data.seed + offset;
  const auto dataset =
      std::make_shared<const PredictionDataset>(Generate(data));
  std::vector<ComparisonRow> rows;
  for (Strategy strategy : spec.strategies) {
    for (std::size_t budget : spec.budgets) {
      ActiveTestingConfig testing = spec.testing;
      testing.strategy = strategy;
      testing.budget = budget;
      testing.seed = spec.testing.seed + offset;
      OracleAnnotator annotator;
      const EvaluationReport report =
          RunActiveTesting(dataset, testing, annotator);

      ComparisonRow row{strategy, budget, offset, 0.0, 0.0, {}, {}, {}};
      if (!report.oracle || !report.expected_distance ||
          !report.held_out_distance) {
        throw ValidationError(
            "comparison needs non-degenerate oracle and noisy labels");
      }
      row.distance = *report.expected_distance;
      row.held_out_distance = *report.held_out_distance;
      for (std::size_t i = 0; i < report.ks.size(); ++i) {
        const double oracle = report.oracle->p_at_k[i];
        row.abs_error.push_back(std::abs(report.expected.p_at_k[i] - oracle));
        row.held_out_abs_error.push_back(
            std::abs(report.held_out.p_at_k[i] - oracle));
      }
      if (report.initial_distance) {
        row.trace.push_back(*report.initial_distance);
      }
      for (const IterationRecord& record : report.iterations) {
        if (record.reference_distance) {
          row.trace.push_back(*record.reference_distance);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

ComparisonTable CompareStrategies(const ComparisonSpec& spec) {
  if (spec.n_seeds < 1) throw ValidationError("n_seeds must be at least 1");
  ValidateSyntheticConfig(spec.data);

  std::vector<std::vector<ComparisonRow>> per_seed(spec.n_seeds);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t s = next++; s < spec.n_seeds; s = next++) {
      try {
        per_seed[s] = RunSeed(spec, s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(
      spec.threads == 0 ? std::thread::hardware_concurrency() : spec.threads,
      1, spec.n_seeds);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);

  ComparisonTable table;
  table.ks = spec.testing.ks;
  for (auto& rows : per_seed) {
    for (auto& row : rows) table.rows.push_back(std::move(row));
  }
  for (Strategy strategy : spec.strategies) {
    for (std::size_t budget : spec.budgets) {
      ComparisonSummary summary{strategy, budget, 0.0,
                                std::vector<double>(table.ks.size(), 0.0)};
      std::size_t count = 0;
      for (const ComparisonRow& row : table.rows) {
        if (row.strategy != strategy || row.budget != budget) continue;
        ++count;
        summary.mean_distance += row.distance;
        for (std::size_t i = 0; i < row.abs_error.size(); ++i) {
          summary.mean_abs_error[i] += row.abs_error[i];
        }
      }
      summary.mean_distance /= count;
      for (double& e : summary.mean_abs_error) e /= count;
      table.summary.push_back(std::move(summary));
    }
  }
  return table;
}

}  // namespace activetest
