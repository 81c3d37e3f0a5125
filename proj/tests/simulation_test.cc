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

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "activetest/errors.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace activetest {
namespace {

using ::testing::SizeIs;

TEST(Generate, IsDeterministicInTheSeed) {
  SyntheticConfig config;
  config.n_pairs = 200;
  EXPECT_EQ(Generate(config), Generate(config));
  SyntheticConfig other = config;
  other.seed = 2;
  EXPECT_NE(Generate(config), Generate(other));
}

TEST(Generate, ProducesAWellFormedDatasetWithOracleLabels) {
  SyntheticConfig config;
  config.n_pairs = 300;
  config.relations = 4;
  const PredictionDataset dataset = Generate(config);
  EXPECT_EQ(dataset.num_pairs(), 300u);
  EXPECT_EQ(dataset.num_relations(), 4u);
  EXPECT_TRUE(dataset.has_oracle());
  EXPECT_EQ(dataset.pair(0).pair_id, "pair000");
  for (const EntityPair& pair : dataset.pairs()) {
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_GT(pair.scores[k], 0.0);
      EXPECT_LT(pair.scores[k], 1.0);
      // Without false positives a noisy 1 is always a true 1.
      if (pair.noisy_labels[k] == 1) {
        EXPECT_EQ((*pair.oracle_labels)[k], 1);
      }
    }
  }
}

TEST(Generate, HitsTheConfiguredNoiseRates) {
  SyntheticConfig config;
  config.n_pairs = 4000;
  config.relations = 5;
  GenerationStats stats;
  Generate(config, &stats);
  const double positive_pairs =
      static_cast<double>(stats.positive_pairs) / config.n_pairs;
  // Binomial standard errors are about 0.0065 and 0.0082 here.
  EXPECT_NEAR(positive_pairs, 0.212, 0.03);
  EXPECT_NEAR(stats.CellFalseNegativeRate(), 0.0875, 0.03);
  EXPECT_EQ(stats.false_positive_cells, 0u);
  EXPECT_EQ(stats.positive_cells + stats.negative_cells, 20000u);
}

TEST(Generate, PairFalseNegativeRateWithinOnePoint) {
  SyntheticConfig config;
  config.n_pairs = 4000;
  config.relations = 1;
  GenerationStats stats;
  Generate(config, &stats);
  // With one relation every false-negative cell empties its pair.
  EXPECT_EQ(stats.false_negative_pairs, stats.false_negative_cells);
  EXPECT_NEAR(static_cast<double>(stats.false_negative_pairs) /
                  stats.positive_pairs,
              0.0875, 0.01 + 3 * std::sqrt(0.0875 * 0.9125 /
                                           stats.positive_pairs));
}

TEST(Generate, FalsePositivesWhenAsked) {
  SyntheticConfig config;
  config.n_pairs = 2000;
  config.false_positive_rate = 0.05;
  GenerationStats stats;
  Generate(config, &stats);
  EXPECT_NEAR(static_cast<double>(stats.false_positive_cells) /
                  stats.negative_cells,
              0.05, 0.01);
}

TEST(ValidateSyntheticConfig, RejectsBadParameters) {
  SyntheticConfig config;
  config.n_pairs = 0;
  EXPECT_THROW(ValidateSyntheticConfig(config), ValidationError);
  config = {};
  config.relations = 0;
  EXPECT_THROW(ValidateSyntheticConfig(config), ValidationError);
  config = {};
  config.false_negative_rate = 1.5;
  EXPECT_THROW(ValidateSyntheticConfig(config), ValidationError);
  config = {};
  config.positive_rate = -0.1;
  EXPECT_THROW(ValidateSyntheticConfig(config), ValidationError);
  config = {};
  config.score_noise = NAN;
  EXPECT_THROW(ValidateSyntheticConfig(config), ValidationError);
  EXPECT_NO_THROW(ValidateSyntheticConfig(SyntheticConfig{}));
}

TEST(OracleAnnotator, AnswersFromTheOracleAndCountsCalls) {
  SyntheticConfig config;
  config.n_pairs = 20;
  const PredictionDataset dataset = Generate(config);
  OracleAnnotator annotator;
  const BatchLabels labels =
      annotator.Annotate(dataset, {"pair03", "pair11"});
  ASSERT_THAT(labels, SizeIs(2));
  EXPECT_EQ(labels.at("pair03"), *dataset.pair(3).oracle_labels);
  EXPECT_EQ(annotator.calls(), 1u);
  EXPECT_THROW(annotator.Annotate(dataset, {"nope"}), AnnotatorError);
}

TEST(OracleAnnotator, FailsWithoutOracleLabels) {
  EntityPair pair;
  pair.pair_id = "a";
  pair.head = "h";
  pair.tail = "t";
  pair.scores = {0.5};
  pair.noisy_labels = {0};
  const PredictionDataset dataset({"r"}, {pair});
  OracleAnnotator annotator;
  EXPECT_THROW(annotator.Annotate(dataset, {"a"}), AnnotatorError);
}

ComparisonSpec SmallSpec() {
  ComparisonSpec spec;
  spec.data.n_pairs = 150;
  spec.data.relations = 3;
  spec.data.positive_rate = 0.3;
  spec.testing.batch_size = 10;
  spec.testing.ks = {10, 30};
  spec.testing.initial = {InitialPolicyKind::kNoisyPositives, 20};
  spec.budgets = {20, 40};
  spec.n_seeds = 4;
  return spec;
}

TEST(CompareStrategies, OneRowPerSeedStrategyAndBudget) {
  const ComparisonTable table = CompareStrategies(SmallSpec());
  EXPECT_THAT(table.rows, SizeIs(4 * 2 * 2));
  EXPECT_THAT(table.summary, SizeIs(4));
  EXPECT_EQ(table.ks, (std::vector<std::size_t>{10, 30}));
  for (const ComparisonRow& row : table.rows) {
    EXPECT_THAT(row.abs_error, SizeIs(2));
    EXPECT_THAT(row.trace, SizeIs(1 + row.budget / 10));
    EXPECT_DOUBLE_EQ(row.trace.back(), row.distance);
  }
  const ComparisonSummary& first = table.summary.front();
  double mean = 0.0;
  for (const ComparisonRow& row : table.rows) {
    if (row.strategy == first.strategy && row.budget == first.budget) {
      mean += row.distance / 4;
    }
  }
  EXPECT_NEAR(first.mean_distance, mean, 1e-15);
}

TEST(CompareStrategies, StrategiesShareDataAndSeedBatch) {
  const ComparisonTable table = CompareStrategies(SmallSpec());
  for (const ComparisonRow& a : table.rows) {
    for (const ComparisonRow& b : table.rows) {
      if (a.seed == b.seed) {
        EXPECT_EQ(a.held_out_distance, b.held_out_distance);
        EXPECT_EQ(a.trace.front(), b.trace.front());
      }
    }
  }
}

TEST(CompareStrategies, ResultDoesNotDependOnThreadCount) {
  ComparisonSpec spec = SmallSpec();
  spec.threads = 1;
  const ComparisonTable serial = CompareStrategies(spec);
  spec.threads = 3;
  EXPECT_EQ(CompareStrategies(spec), serial);
  EXPECT_EQ(CompareStrategies(spec), serial);
}

TEST(CompareStrategies, RejectsZeroSeeds) {
  ComparisonSpec spec = SmallSpec();
  spec.n_seeds = 0;
  EXPECT_THROW(CompareStrategies(spec), ValidationError);
}

}  // namespace
}  // namespace activetest
