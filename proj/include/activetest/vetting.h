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

// The vet / estimate loop.
//
// Pairs are split into an unvetted set U and a vetted set V. Each iteration
// picks a batch from U by a vetting strategy, obtains true labels for it from
// an Annotator, moves it to V, refits the posterior model and recomputes the
// expected metrics. The budget is counted in entity pairs.
//
// ActiveTestingSession exposes the loop one batch at a time. The annotator
// may be a human behind the CLI or the HTTP server, and the session can be
// snapshotted and restored between batches.

#ifndef ACTIVETEST_VETTING_H_
#define ACTIVETEST_VETTING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "activetest/dataset.h"
#include "activetest/estimator.h"
#include "activetest/metrics.h"
#include "activetest/random.h"

namespace activetest {

enum class Strategy { kMemc, kRandom };

// How cell priorities combine into a pair priority under MEMC.
enum class PairAggregation { kMax, kSum };

enum class InitialPolicyKind {
  kRandom,         // `count` pairs drawn uniformly.
  kNoisyPositives,  // Every noisy-positive pair plus `count` noisy-negatives.
};

struct InitialPolicy {
  InitialPolicyKind kind = InitialPolicyKind::kRandom;
  std::size_t count = 50;

  bool operator==(const InitialPolicy&) const = default;
};

struct ActiveTestingConfig {
  Strategy strategy = Strategy::kMemc;
  PairAggregation aggregation = PairAggregation::kMax;
  std::size_t batch_size = 20;
  std::size_t budget = 100;
  std::vector<std::size_t> ks = {100, 200, 300};
  InitialPolicy initial;
  std::uint64_t seed = 0;
  EstimatorOptions estimator;

  bool operator==(const ActiveTestingConfig&) const = default;
};

const char* StrategyName(Strategy strategy);
Strategy ParseStrategy(const std::string& name);
const char* AggregationName(PairAggregation aggregation);
PairAggregation ParseAggregation(const std::string& name);
const char* InitialPolicyName(InitialPolicyKind kind);
InitialPolicyKind ParseInitialPolicy(const std::string& name);

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based; 0 is the initial seed batch.
  std::vector<std::string> batch;
  std::size_t budget_remaining = 0;
  MetricReport metrics;  // Expected metrics after the refit; no curve.
  NoiseTable noise;
  // Distance of the expected PR curve to a reference curve, when one was
  // available to the caller (simulation runs). Never set by the session.
  std::optional<double> reference_distance;

  bool operator==(const IterationRecord&) const = default;
};

struct VettingState {
  std::set<std::string> unvetted;
  VettedLabels vetted;
  std::size_t initial_budget = 0;
  std::size_t budget_remaining = 0;
  std::optional<IterationRecord> seed;
  std::vector<IterationRecord> history;

  bool operator==(const VettingState&) const = default;
};

// Batch labels: pair_id -> one label per relation.
using BatchLabels = std::map<std::string, LabelRow>;

class Annotator {
 public:
  virtual ~Annotator() = default;
  // Returns true labels for exactly the requested pairs. May block.
  // Throws AnnotatorError on failure.
  virtual BatchLabels Annotate(const PredictionDataset& dataset,
                               const std::vector<std::string>& batch) = 0;
};

// Expected absolute change of P@K when a cell with posterior q is vetted:
// (2/K) q (1 - q).
double MemcPriority(double q, std::size_t k);

// MEMC priority of one pair: max (or sum) of q(1-q) over its unvetted cells.
// The 2/K factor is omitted. Throws ValidationError on an unknown pair.
double MemcPairPriority(const PredictionDataset& dataset,
                        const RankedList& ranking,
                        const PosteriorTable& posteriors,
                        const std::string& pair_id,
                        PairAggregation aggregation = PairAggregation::kMax);

struct PairPriority {
  std::string pair_id;
  double priority;
};

// Priorities of every unvetted pair, in pair_id order. The random strategy
// draws one uniform per pair in that order.
std::vector<PairPriority> PairPriorities(const PredictionDataset& dataset,
                                         const RankedList& ranking,
                                         const PosteriorTable& posteriors,
                                         const std::set<std::string>& unvetted,
                                         Strategy strategy,
                                         PairAggregation aggregation, Rng& rng);

// Top min(batch_size, budget_remaining, |U|) pairs by priority, ties by
// pair_id ascending.
std::vector<std::string> SelectBatch(const VettingState& state,
                                     std::vector<PairPriority> priorities,
                                     std::size_t batch_size);

struct PendingBatch {
  std::string batch_id;
  std::vector<std::string> pairs;
  bool initial = false;  // Seed batch; not charged to the budget.

  bool operator==(const PendingBatch&) const = default;
};

// Everything needed to resume a session.
struct SessionSnapshot {
  ActiveTestingConfig config;
  VettingState state;
  std::string rng_state;
  std::optional<PendingBatch> pending;
  std::uint64_t batches_issued = 0;

  bool operator==(const SessionSnapshot&) const = default;
};

struct EvaluationReport {
  std::vector<std::size_t> ks;
  MetricReport held_out;
  MetricReport expected;
  std::optional<MetricReport> oracle;
  std::optional<double> expected_distance;  // To the oracle curve.
  std::optional<double> held_out_distance;
  // Expected-vs-oracle distance before any budget was spent.
  std::optional<double> initial_distance;
  std::optional<IterationRecord> seed;
  std::vector<IterationRecord> iterations;

  bool operator==(const EvaluationReport&) const = default;
};

class ActiveTestingSession {
 public:
  // Draws the seed batch (if the initial policy asks for one) or the first
  // regular batch. Throws ValidationError on an unusable config.
  static ActiveTestingSession Start(
      std::shared_ptr<const PredictionDataset> dataset,
      const ActiveTestingConfig& config);

  // Rebuilds a session from a snapshot. The model, posteriors and metrics are
  // refitted from the vetted set.
  static ActiveTestingSession Restore(
      std::shared_ptr<const PredictionDataset> dataset,
      const SessionSnapshot& snapshot);

  const PendingBatch* pending() const {
    return pending_ ? &*pending_ : nullptr;
  }
  bool done() const { return !pending_.has_value(); }

  // Applies one vetting step for the pending batch. Throws ConflictError if
  // batch_id is not the pending batch and ValidationError if the labels do not
  // cover exactly the batch. On any error the session is unchanged.
  void Submit(const std::string& batch_id, const BatchLabels& labels);

  // Annotates the pending batch and submits it. Annotator errors propagate
  // and leave the session unchanged.
  void Step(Annotator& annotator);

  // Replaces the pending regular batch by a fresh selection of the given
  // size (issuing a new batch id). No-op for a seed batch or when done.
  void Reselect(std::size_t batch_size);

  SessionSnapshot Snapshot() const;

  const PredictionDataset& dataset() const { return *dataset_; }
  const ActiveTestingConfig& config() const { return config_; }
  const VettingState& state() const { return state_; }
  const RankedList& ranking() const { return *ranking_; }
  const PosteriorModel& model() const { return model_; }
  const PosteriorTable& posteriors() const { return posteriors_; }
  const MetricReport& metrics() const { return metrics_; }

  // Held-out and expected metrics plus the iteration history. Oracle metrics
  // are attached only when include_oracle is set and the dataset has them.
  EvaluationReport Report(bool include_oracle) const;

 private:
  ActiveTestingSession() = default;

  void Refit();
  void IssueNextBatch();
  std::vector<std::string> DrawSeedBatch();

  std::shared_ptr<const PredictionDataset> dataset_;
  std::shared_ptr<const RankedList> ranking_;
  ActiveTestingConfig config_;
  VettingState state_;
  Rng rng_;
  std::optional<PendingBatch> pending_;
  std::uint64_t batches_issued_ = 0;

  PosteriorModel model_;
  PosteriorTable posteriors_;
  MetricReport metrics_;
};

// Runs the loop to completion. When the dataset carries oracle labels and
// track_reference is set, each record gets its distance to the oracle curve.
EvaluationReport RunToCompletion(ActiveTestingSession& session,
                                 Annotator& annotator,
                                 bool track_reference = true);

EvaluationReport RunActiveTesting(
    std::shared_ptr<const PredictionDataset> dataset,
    const ActiveTestingConfig& config, Annotator& annotator);

// Metrics that tolerate an all-zero label vector: recall and curve are left
// empty when the total is zero.
MetricReport SafeMetrics(std::span<const double> labels,
                         const std::vector<std::size_t>& ks,
                         MetricSource source);

}  // namespace activetest

#endif  // ACTIVETEST_VETTING_H_
