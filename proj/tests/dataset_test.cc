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

#include "activetest/dataset.h"

#include <algorithm>
#include <numeric>

#include "activetest/errors.h"
#include "activetest/random.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace activetest {
namespace {

using test::MakePair;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

TEST(PredictionDataset, ValidDatasetExposesCells) {
  const PredictionDataset dataset(
      {"r0", "r1"}, {MakePair("a", {0.2, 0.7}, {0, 1}, LabelRow{1, 1}),
                     MakePair("b", {0.9, 0.1}, {1, 0}, LabelRow{1, 0})});
  EXPECT_EQ(dataset.num_pairs(), 2u);
  EXPECT_EQ(dataset.num_relations(), 2u);
  EXPECT_EQ(dataset.num_cells(), 4u);
  EXPECT_TRUE(dataset.has_oracle());
  EXPECT_EQ(dataset.FindPair("b"), 1u);
  EXPECT_EQ(dataset.FindPair("zz"), std::nullopt);
  EXPECT_EQ(dataset.FindRelation("r1"), 1u);
  EXPECT_EQ(dataset.FindRelation("r9"), std::nullopt);
  EXPECT_EQ(dataset.PairOfCell(3), 1u);
  EXPECT_EQ(dataset.RelationOfCell(3), 1u);
  EXPECT_DOUBLE_EQ(dataset.CellScore(2), 0.9);
}

TEST(PredictionDataset, HasOracleRequiresEveryPair) {
  const PredictionDataset dataset(
      {"r0"}, {MakePair("a", {0.2}, {0}, LabelRow{1}),
               MakePair("b", {0.3}, {0})});
  EXPECT_FALSE(dataset.has_oracle());
}

TEST(PredictionDataset, RejectsDuplicatePairIds) {
  EXPECT_THROW(PredictionDataset({"r0"}, {MakePair("a", {0.2}, {0}),
                                          MakePair("a", {0.3}, {1})}),
               ValidationError);
}

TEST(PredictionDataset, RejectsWrongRowLengths) {
  EXPECT_THROW(PredictionDataset({"r0", "r1"}, {MakePair("a", {0.2}, {0, 1})}),
               ValidationError);
  EXPECT_THROW(
      PredictionDataset({"r0", "r1"}, {MakePair("a", {0.2, 0.3}, {0})}),
      ValidationError);
  EXPECT_THROW(
      PredictionDataset({"r0"}, {MakePair("a", {0.2}, {0}, LabelRow{})}),
      ValidationError);
}

TEST(PredictionDataset, RejectsScoresOnOrOutsideTheBoundary) {
  for (double score : {0.0, 1.0, -0.1, 1.5}) {
    EXPECT_THROW(PredictionDataset({"r0"}, {MakePair("a", {score}, {0})}),
                 ValidationError)
        << score;
  }
}

TEST(PredictionDataset, RejectsLabelsOutsideZeroOne) {
  EXPECT_THROW(PredictionDataset({"r0"}, {MakePair("a", {0.5}, {2})}),
               ValidationError);
  EXPECT_THROW(
      PredictionDataset({"r0"}, {MakePair("a", {0.5}, {0}, LabelRow{3})}),
      ValidationError);
}

TEST(PredictionDataset, ClampOptionPullsBoundaryScoresInside) {
  const PredictionDataset dataset(
      {"r0", "r1"}, {MakePair("a", {1.0, 0.0}, {1, 0})},
      {.clamp_scores = true});
  EXPECT_DOUBLE_EQ(dataset.pair(0).scores[0], 1.0 - kClampEpsilon);
  EXPECT_DOUBLE_EQ(dataset.pair(0).scores[1], kClampEpsilon);
  EXPECT_THROW(PredictionDataset({"r0"}, {MakePair("a", {1.5}, {1})},
                                 {.clamp_scores = true}),
               ValidationError);
}

TEST(FlattenAndRank, SortsByScoreDescending) {
  const PredictionDataset dataset(
      {"r0", "r1"}, {MakePair("a", {0.2, 0.7}, {0, 1}),
                     MakePair("b", {0.9, 0.1}, {1, 0})});
  const RankedList ranking = FlattenAndRank(dataset);
  // Cells: a.r0=0, a.r1=1, b.r0=2, b.r1=3.
  EXPECT_THAT(ranking.order(), ElementsAre(2, 1, 0, 3));
  EXPECT_THAT(ranking.scores(), ElementsAre(0.9, 0.7, 0.2, 0.1));
  const RankedItem top = ranking.Item(0);
  EXPECT_EQ(top.rank, 1u);
  EXPECT_EQ(top.pair, 1u);
  EXPECT_EQ(top.relation, 0u);
  EXPECT_EQ(ranking.PositionOf(0, 1), 1u);
}

TEST(FlattenAndRank, BreaksTiesByPairIdThenRelation) {
  // Pair "b" is stored first but "a" sorts first by id.
  const PredictionDataset dataset(
      {"r0", "r1"}, {MakePair("b", {0.5, 0.5}, {0, 0}),
                     MakePair("a", {0.5, 0.5}, {0, 0})});
  const RankedList ranking = FlattenAndRank(dataset);
  EXPECT_THAT(ranking.order(), ElementsAre(2, 3, 0, 1));
}

TEST(FlattenAndRank, PositionIsTheInverseOfCellAt) {
  Rng rng(7);
  std::vector<EntityPair> pairs;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> scores;
    for (int k = 0; k < 3; ++k) {
      // Coarse scores produce many ties.
      scores.push_back(0.05 + 0.1 * static_cast<double>(rng.Below(9)));
    }
    pairs.push_back(MakePair("p" + std::to_string(i), scores, {0, 0, 0}));
  }
  const PredictionDataset dataset({"x", "y", "z"}, pairs);
  const RankedList ranking = FlattenAndRank(dataset);
  ASSERT_EQ(ranking.size(), dataset.num_cells());
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    EXPECT_EQ(ranking.PositionOf(ranking.CellAt(pos)), pos);
    EXPECT_EQ(ranking.Item(pos).rank, pos + 1);
    EXPECT_EQ(ranking.scores()[pos], dataset.CellScore(ranking.CellAt(pos)));
    if (pos > 0) {
      const std::size_t prev = ranking.CellAt(pos - 1);
      const std::size_t cell = ranking.CellAt(pos);
      ASSERT_GE(dataset.CellScore(prev), dataset.CellScore(cell));
      if (dataset.CellScore(prev) == dataset.CellScore(cell)) {
        const auto& prev_id = dataset.pair(dataset.PairOfCell(prev)).pair_id;
        const auto& id = dataset.pair(dataset.PairOfCell(cell)).pair_id;
        EXPECT_TRUE(prev_id < id ||
                    (prev_id == id && dataset.RelationOfCell(prev) <
                                          dataset.RelationOfCell(cell)));
      }
    }
  }
}

TEST(LabelVector, FollowsRankOrder) {
  const PredictionDataset dataset(
      {"r0", "r1"}, {MakePair("a", {0.2, 0.7}, {0, 1}, LabelRow{1, 1}),
                     MakePair("b", {0.9, 0.1}, {1, 0}, LabelRow{0, 0})});
  const RankedList ranking = FlattenAndRank(dataset);
  EXPECT_THAT(LabelVector(dataset, ranking, LabelSource::kNoisy),
              ElementsAre(1, 1, 0, 0));
  EXPECT_THAT(LabelVector(dataset, ranking, LabelSource::kOracle),
              ElementsAre(0, 1, 1, 0));
}

TEST(LabelVector, OracleRequestNamesThePairWithoutLabels) {
  const PredictionDataset dataset(
      {"r0"}, {MakePair("a", {0.2}, {0}, LabelRow{1}),
               MakePair("lonely", {0.3}, {0})});
  const RankedList ranking = FlattenAndRank(dataset);
  try {
    LabelVector(dataset, ranking, LabelSource::kOracle);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_THAT(e.what(), HasSubstr("lonely"));
  }
}

}  // namespace
}  // namespace activetest
