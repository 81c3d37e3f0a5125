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
#include <cmath>
#include <numeric>
#include <utility>

#include "activetest/errors.h"

namespace activetest {
namespace {

void CheckLabels(const LabelRow& labels, std::size_t num_relations,
                 const std::string& pair_id, const char* what) {
  if (labels.size() != num_relations) {
    throw ValidationError("pair '" + pair_id + "': " + what + " has " +
                          std::to_string(labels.size()) +
                          " entries, expected " +
                          std::to_string(num_relations));
  }
  for (Label label : labels) {
    if (label > 1) {
      throw ValidationError("pair '" + pair_id + "': " + what +
                            " must be 0 or 1");
    }
  }
}

}  // namespace

PredictionDataset::PredictionDataset(std::vector<std::string> relations,
                                     std::vector<EntityPair> pairs,
                                     const DatasetOptions& options)
    : relations_(std::move(relations)), pairs_(std::move(pairs)) {
  {
    std::vector<std::string> sorted = relations_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("duplicate relation name");
    }
  }
  if (relations_.empty() && !pairs_.empty()) {
    throw ValidationError("dataset has pairs but no relations");
  }
  const std::size_t p = relations_.size();
  pair_index_.reserve(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    EntityPair& pair = pairs_[i];
    if (!pair_index_.emplace(pair.pair_id, i).second) {
      throw ValidationError("duplicate pair_id '" + pair.pair_id + "'");
    }
    if (pair.scores.size() != p) {
      throw ValidationError("pair '" + pair.pair_id + "': scores has " +
                            std::to_string(pair.scores.size()) +
                            " entries, expected " + std::to_string(p));
    }
    for (double& score : pair.scores) {
      if (options.clamp_scores && score >= 0.0 && score <= 1.0) {
        score = std::clamp(score, kClampEpsilon, 1.0 - kClampEpsilon);
      }
      if (!(score > 0.0 && score < 1.0)) {
        throw ValidationError("pair '" + pair.pair_id +
                              "': score must lie strictly inside (0,1)");
      }
    }
    CheckLabels(pair.noisy_labels, p, pair.pair_id, "noisy labels");
    if (pair.oracle_labels) {
      CheckLabels(*pair.oracle_labels, p, pair.pair_id, "oracle labels");
    }
  }
}

bool PredictionDataset::has_oracle() const {
  return std::all_of(pairs_.begin(), pairs_.end(), [](const EntityPair& pair) {
    return pair.oracle_labels.has_value();
  });
}

std::optional<std::size_t> PredictionDataset::FindPair(
    const std::string& pair_id) const {
  auto it = pair_index_.find(pair_id);
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> PredictionDataset::FindRelation(
    const std::string& name) const {
  auto it = std::find(relations_.begin(), relations_.end(), name);
  if (it == relations_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - relations_.begin());
}

RankedList::RankedList(std::vector<std::size_t> order,
                       std::size_t num_relations,
                       const PredictionDataset& dataset)
    : order_(std::move(order)), num_relations_(num_relations) {
  position_.assign(order_.size(), 0);
  scores_.resize(order_.size());
  for (std::size_t pos = 0; pos < order_.size(); ++pos) {
    position_[order_[pos]] = pos;
    scores_[pos] = dataset.CellScore(order_[pos]);
  }
}

RankedItem RankedList::Item(std::size_t position) const {
  const std::size_t cell = order_[position];
  return RankedItem{position + 1, cell / num_relations_,
                    cell % num_relations_, scores_[position]};
}

RankedList FlattenAndRank(const PredictionDataset& dataset) {
  const std::size_t p = dataset.num_relations();
  std::vector<std::size_t> order(dataset.num_cells());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) {
              const double sa = dataset.CellScore(a);
              const double sb = dataset.CellScore(b);
              if (sa != sb) return sa > sb;
              const std::string& ida = dataset.pair(a / p).pair_id;
              const std::string& idb = dataset.pair(b / p).pair_id;
              if (ida != idb) return ida < idb;
              return a % p < b % p;
            });
  return RankedList(std::move(order), p, dataset);
}

std::vector<double> LabelVector(const PredictionDataset& dataset,
                                const RankedList& ranking,
                                LabelSource source) {
  if (source == LabelSource::kOracle) {
    for (const EntityPair& pair : dataset.pairs()) {
      if (!pair.oracle_labels) {
        throw ValidationError("oracle labels missing for pair '" +
                              pair.pair_id + "'");
      }
    }
  }
  std::vector<double> labels(ranking.size());
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    const std::size_t cell = ranking.CellAt(pos);
    const EntityPair& pair = dataset.pair(dataset.PairOfCell(cell));
    const std::size_t relation = dataset.RelationOfCell(cell);
    const LabelRow& row = source == LabelSource::kOracle ? *pair.oracle_labels
                                                         : pair.noisy_labels;
    labels[pos] = row[relation];
  }
  return labels;
}

}  // namespace activetest
