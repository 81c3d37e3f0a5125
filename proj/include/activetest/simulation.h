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

// Synthetic noisy-labelled datasets with known ground truth, a simulated
// annotator backed by that ground truth, and the strategy comparison sweep.
//
// By default 21.2% of pairs hold at least one relation and 8.75% of
// true-positive cells are labelled negative by the noisy source.

#ifndef ACTIVETEST_SIMULATION_H_
#define ACTIVETEST_SIMULATION_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "activetest/dataset.h"
#include "activetest/vetting.h"

namespace activetest {

struct SyntheticConfig {
  std::size_t n_pairs = 500;
  std::size_t relations = 5;
  double positive_rate = 0.212;
  // Probability that a positive pair holds each relation besides its first.
  double extra_relation_rate = 0.1;
  double false_negative_rate = 0.0875;  // Per true-positive cell.
  double false_positive_rate = 0.0;     // Per true-negative cell.
  // score = sigmoid(base + signal * z + noise * N(0,1)).
  double score_base = -3.0;
  double score_signal = 4.0;
  double score_noise = 1.5;
  std::uint64_t seed = 1;

  bool operator==(const SyntheticConfig&) const = default;
};

// Throws ValidationError unless rates are in [0,1] and counts positive.
void ValidateSyntheticConfig(const SyntheticConfig& config);

struct GenerationStats {
  std::size_t positive_cells = 0;
  std::size_t false_negative_cells = 0;
  std::size_t negative_cells = 0;
  std::size_t false_positive_cells = 0;
  std::size_t positive_pairs = 0;
  // Positive pairs whose noisy labels are all zero.
  std::size_t false_negative_pairs = 0;

  double CellFalseNegativeRate() const;
  double PairFalseNegativeRate(std::size_t n_pairs) const;
};

// Deterministic in config.seed. The dataset carries oracle labels.
PredictionDataset Generate(const SyntheticConfig& config,
                           GenerationStats* stats = nullptr);

// Answers with the dataset's oracle labels. Throws AnnotatorError for a pair
// without them.
class OracleAnnotator : public Annotator {
 public:
  BatchLabels Annotate(const PredictionDataset& dataset,
                       const std::vector<std::string>& batch) override;
  std::size_t calls() const { return calls_; }

 private:
  std::size_t calls_ = 0;
};

struct ComparisonRow {
  Strategy strategy;
  std::size_t budget;
  std::uint64_t seed;
  double distance;           // Expected vs oracle PR curve.
  double held_out_distance;  // Held-out vs oracle PR curve.
  std::vector<double> abs_error;           // |E[P@K] - oracle P@K| per K.
  std::vector<double> held_out_abs_error;  // |held-out P@K - oracle P@K|.
  std::vector<double> trace;  // Distance before any budget, then per batch.

  bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonSummary {
  Strategy strategy;
  std::size_t budget;
  double mean_distance;
  std::vector<double> mean_abs_error;

  bool operator==(const ComparisonSummary&) const = default;
};

struct ComparisonTable {
  std::vector<std::size_t> ks;
  std::vector<ComparisonRow> rows;
  std::vector<ComparisonSummary> summary;

  bool operator==(const ComparisonTable&) const = default;
};

struct ComparisonSpec {
  SyntheticConfig data;
  ActiveTestingConfig testing;  // strategy and budget are overridden.
  std::vector<Strategy> strategies = {Strategy::kMemc, Strategy::kRandom};
  std::vector<std::size_t> budgets = {100};
  std::size_t n_seeds = 20;
  std::size_t threads = 0;  // 0 uses the hardware concurrency.
};

// For every seed s in [0, n_seeds) the dataset is generated with
// data.seed + s and the loop is seeded with testing.seed + s, so strategies
// are compared on identical data and identical seed batches. Seeds run in
// parallel; the result does not depend on the thread count.
ComparisonTable CompareStrategies(const ComparisonSpec& spec);

}  // namespace activetest

#endif  // ACTIVETEST_SIMULATION_H_
