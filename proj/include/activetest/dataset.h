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

// Data model shared by the estimator, metrics and vetting loop.
//
// A dataset holds N entity pairs scored against p relations. Every
// (pair, relation) combination is a "cell"; cells are addressed by the flat
// index pair * p + relation. The non-relation class is not scored: a negative
// pair is simply one whose labels are all zero.

#ifndef ACTIVETEST_DATASET_H_
#define ACTIVETEST_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace activetest {

using Label = std::uint8_t;
using LabelRow = std::vector<Label>;  // One label per relation.

struct EntityPair {
  std::string pair_id;
  std::string head;
  std::string tail;
  std::vector<std::string> sentences;  // Display only.
  std::vector<double> scores;          // Indexed by relation, in (0,1).
  LabelRow noisy_labels;
  std::optional<LabelRow> oracle_labels;

  bool operator==(const EntityPair&) const = default;
};

struct DatasetOptions {
  // Clamp scores into [kClampEpsilon, 1 - kClampEpsilon] instead of rejecting
  // scores on or outside the unit interval boundary.
  bool clamp_scores = false;
};

inline constexpr double kClampEpsilon = 1e-6;

// Immutable, validated collection of scored entity pairs.
class PredictionDataset {
 public:
  PredictionDataset() = default;

  // Throws ValidationError if any invariant is violated: duplicate pair ids,
  // score or label vectors whose length differs from relations.size(), scores
  // outside (0,1), labels outside {0,1}.
  PredictionDataset(std::vector<std::string> relations,
                    std::vector<EntityPair> pairs,
                    const DatasetOptions& options = {});

  const std::vector<std::string>& relations() const { return relations_; }
  const std::vector<EntityPair>& pairs() const { return pairs_; }
  const EntityPair& pair(std::size_t index) const { return pairs_[index]; }

  std::size_t num_pairs() const { return pairs_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_cells() const { return pairs_.size() * relations_.size(); }

  // True iff every pair carries oracle labels.
  bool has_oracle() const;

  std::optional<std::size_t> FindPair(const std::string& pair_id) const;
  std::optional<std::size_t> FindRelation(const std::string& name) const;

  // Pair index of a flat cell index, and relation index likewise.
  std::size_t PairOfCell(std::size_t cell) const {
    return cell / relations_.size();
  }
  std::size_t RelationOfCell(std::size_t cell) const {
    return cell % relations_.size();
  }
  double CellScore(std::size_t cell) const {
    return pairs_[PairOfCell(cell)].scores[RelationOfCell(cell)];
  }

  bool operator==(const PredictionDataset& other) const {
    return relations_ == other.relations_ && pairs_ == other.pairs_;
  }

 private:
  std::vector<std::string> relations_;
  std::vector<EntityPair> pairs_;
  std::unordered_map<std::string, std::size_t> pair_index_;
};

struct RankedItem {
  std::size_t rank;  // 1-based.
  std::size_t pair;  // Index into PredictionDataset::pairs().
  std::size_t relation;
  double score;
};

// All cells sorted by score, descending. Ties are broken by pair id and then
// relation index, both ascending, so the order is fully deterministic.
class RankedList {
 public:
  RankedList() = default;
  RankedList(std::vector<std::size_t> order, std::size_t num_relations,
             const PredictionDataset& dataset);

  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }

  // Flat cell index at the given 0-based position.
  std::size_t CellAt(std::size_t position) const { return order_[position]; }
  // 0-based position of a flat cell index.
  std::size_t PositionOf(std::size_t cell) const { return position_[cell]; }
  std::size_t PositionOf(std::size_t pair, std::size_t relation) const {
    return position_[pair * num_relations_ + relation];
  }

  RankedItem Item(std::size_t position) const;
  const std::vector<double>& scores() const { return scores_; }
  const std::vector<std::size_t>& order() const { return order_; }

 private:
  std::vector<std::size_t> order_;     // position -> cell
  std::vector<std::size_t> position_;  // cell -> position
  std::vector<double> scores_;         // position -> score
  std::size_t num_relations_ = 0;
};

RankedList FlattenAndRank(const PredictionDataset& dataset);

enum class LabelSource { kNoisy, kOracle };

// Labels of every cell in rank order, as reals so they can be fed straight
// into the metric primitives. Throws ValidationError naming the first pair
// without oracle labels when kOracle is requested on a dataset lacking them.
std::vector<double> LabelVector(const PredictionDataset& dataset,
                                const RankedList& ranking,
                                LabelSource source);

}  // namespace activetest

#endif  // ACTIVETEST_DATASET_H_
