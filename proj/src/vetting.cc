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

#include "activetest/vetting.h"

#include <algorithm>
#include <utility>

#include "activetest/errors.h"
#include "activetest/kernels.h"

namespace activetest {

const char* StrategyName(Strategy strategy) {
  return strategy == Strategy::kMemc ? "memc" : "random";
}

Strategy ParseStrategy(const std::string& name) {
  if (name == "memc") return Strategy::kMemc;
  if (name == "random") return Strategy::kRandom;
  throw ValidationError("unknown strategy '" + name + "'");
}

const char* AggregationName(PairAggregation aggregation) {
  return aggregation == PairAggregation::kMax ? "max" : "sum";
}

PairAggregation ParseAggregation(const std::string& name) {
  if (name == "max") return PairAggregation::kMax;
  if (name == "sum") return PairAggregation::kSum;
  throw ValidationError("unknown pair aggregation '" + name + "'");
}

const char* InitialPolicyName(InitialPolicyKind kind) {
  return kind == InitialPolicyKind::kRandom ? "random" : "noisy-positives";
}

InitialPolicyKind ParseInitialPolicy(const std::string& name) {
  if (name == "random") return InitialPolicyKind::kRandom;
  if (name == "noisy-positives") return InitialPolicyKind::kNoisyPositives;
  throw ValidationError("unknown initial policy '" + name + "'");
}

double MemcPriority(double q, std::size_t k) {
  return 2.0 / static_cast<double>(k) * q * (1.0 - q);
}

namespace {

double Aggregate(const PredictionDataset& dataset, const RankedList& ranking,
                 const PosteriorTable& posteriors,
                 std::span<const double> variance, std::size_t pair,
                 PairAggregation aggregation) {
  double result = 0.0;
  for (std::size_t k = 0; k < dataset.num_relations(); ++k) {
    const std::size_t pos = ranking.PositionOf(pair, k);
    if (posteriors.vetted[pos]) continue;
    result = aggregation == PairAggregation::kMax
                 ? std::max(result, variance[pos])
                 : result + variance[pos];
  }
  return result;
}

}  // namespace

double MemcPairPriority(const PredictionDataset& dataset,
                        const RankedList& ranking,
                        const PosteriorTable& posteriors,
                        const std::string& pair_id,
                        PairAggregation aggregation) {
  const auto pair = dataset.FindPair(pair_id);
  if (!pair) throw ValidationError("unknown pair '" + pair_id + "'");
  std::vector<double> variance(posteriors.q.size());
  kernels::BernoulliVariance(posteriors.q, variance);
  return Aggregate(dataset, ranking, posteriors, variance, *pair, aggregation);
}

std::vector<PairPriority> PairPriorities(const PredictionDataset& dataset,
                                         const RankedList& ranking,
                                         const PosteriorTable& posteriors,
                                         const std::set<std::string>& unvetted,
                                         Strategy strategy,
                                         PairAggregation aggregation,
                                         Rng& rng) {
  std::vector<PairPriority> priorities;
  priorities.reserve(unvetted.size());
  if (strategy == Strategy::kRandom) {
    for (const std::string& pair_id : unvetted) {
      priorities.push_back({pair_id, rng.Uniform()});
    }
    return priorities;
  }
  std::vector<double> variance(posteriors.q.size());
  kernels::BernoulliVariance(posteriors.q, variance);
  for (const std::string& pair_id : unvetted) {
    const auto pair = dataset.FindPair(pair_id);
    if (!pair) throw ValidationError("unknown pair '" + pair_id + "'");
    priorities.push_back({pair_id, Aggregate(dataset, ranking, posteriors,
                                             variance, *pair, aggregation)});
  }
  return priorities;
}

std::vector<std::string> SelectBatch(const VettingState& state,
                                     std::vector<PairPriority> priorities,
                                     std::size_t batch_size) {
  std::erase_if(priorities, [&](const PairPriority& p) {
    return !state.unvetted.contains(p.pair_id);
  });
  const std::size_t size = std::min(
      {batch_size, state.budget_remaining, state.unvetted.size(),
       priorities.size()});
  std::partial_sort(priorities.begin(), priorities.begin() + size,
                    priorities.end(),
                    [](const PairPriority& a, const PairPriority& b) {
                      if (a.priority != b.priority) {
                        return a.priority > b.priority;
                      }
                      return a.pair_id < b.pair_id;
                    });
  std::vector<std::string> batch;
  batch.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    batch.push_back(std::move(priorities[i].pair_id));
  }
  return batch;
}

MetricReport SafeMetrics(std::span<const double> labels,
                         const std::vector<std::size_t>& ks,
                         MetricSource source) {
  double total = 0.0;
  for (double v : labels) total += v;
  if (total > 0.0) return ComputeMetrics(labels, ks, source);
  MetricReport report;
  report.source = source;
  report.ks = ks;
  for (std::size_t k : ks) report.p_at_k.push_back(PrecisionAtK(labels, k));
  return report;
}

ActiveTestingSession ActiveTestingSession::Start(
    std::shared_ptr<const PredictionDataset> dataset,
    const ActiveTestingConfig& config) {
  if (config.batch_size == 0) {
    throw ValidationError("batch size must be at least 1");
  }
  for (std::size_t k : config.ks) {
    if (k < 1 || k > dataset->num_cells()) {
      throw ValidationError("K=" + std::to_string(k) +
                            " out of range for a dataset with " +
                            std::to_string(dataset->num_cells()) + " cells");
    }
  }
  ActiveTestingSession session;
  session.dataset_ = std::move(dataset);
  session.ranking_ =
      std::make_shared<const RankedList>(FlattenAndRank(*session.dataset_));
  session.config_ = config;
  session.rng_ = Rng(config.seed);
  for (const EntityPair& pair : session.dataset_->pairs()) {
    session.state_.unvetted.insert(pair.pair_id);
  }
  session.state_.initial_budget = config.budget;
  session.state_.budget_remaining = config.budget;
  session.Refit();

  std::vector<std::string> seed = session.DrawSeedBatch();
  if (!seed.empty()) {
    session.pending_ = PendingBatch{
        "batch-" + std::to_string(++session.batches_issued_), std::move(seed),
        /*initial=*/true};
  } else {
    session.IssueNextBatch();
  }
  return session;
}

ActiveTestingSession ActiveTestingSession::Restore(
    std::shared_ptr<const PredictionDataset> dataset,
    const SessionSnapshot& snapshot) {
  ActiveTestingSession session;
  session.dataset_ = std::move(dataset);
  session.ranking_ =
      std::make_shared<const RankedList>(FlattenAndRank(*session.dataset_));
  session.config_ = snapshot.config;
  session.state_ = snapshot.state;
  session.rng_ = Rng::Deserialize(snapshot.rng_state);
  session.pending_ = snapshot.pending;
  session.batches_issued_ = snapshot.batches_issued;

  std::size_t total = session.state_.unvetted.size();
  for (const auto& [pair_id, labels] : session.state_.vetted) {
    if (session.state_.unvetted.contains(pair_id)) {
      throw ValidationError("pair '" + pair_id + "' is both vetted and not");
    }
    ++total;
  }
  if (total != session.dataset_->num_pairs()) {
    throw ValidationError("session does not partition the dataset's pairs");
  }
  if (session.pending_) {
    for (const std::string& pair_id : session.pending_->pairs) {
      if (!session.state_.unvetted.contains(pair_id)) {
        throw ValidationError("pending batch contains vetted pair '" +
                              pair_id + "'");
      }
    }
  }
  session.Refit();
  return session;
}

std::vector<std::string> ActiveTestingSession::DrawSeedBatch() {
  const InitialPolicy& policy = config_.initial;
  std::vector<std::string> chosen;
  std::vector<std::string> pool;
  for (const std::string& pair_id : state_.unvetted) {  // Sorted.
    if (policy.kind == InitialPolicyKind::kNoisyPositives) {
      const EntityPair& pair = dataset_->pair(*dataset_->FindPair(pair_id));
      const bool positive =
          std::any_of(pair.noisy_labels.begin(), pair.noisy_labels.end(),
                      [](Label y) { return y == 1; });
      if (positive) {
        chosen.push_back(pair_id);
        continue;
      }
    }
    pool.push_back(pair_id);
  }
  // Partial Fisher-Yates over the sorted pool.
  const std::size_t take = std::min(policy.count, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng_.Below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    chosen.push_back(pool[i]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

void ActiveTestingSession::Refit() {
  model_ = FitPosteriorModel(*dataset_, state_.vetted, config_.estimator);
  posteriors_ = EstimateAll(*dataset_, *ranking_, state_.vetted, model_);
  metrics_ = SafeMetrics(posteriors_.q, config_.ks, MetricSource::kExpected);
}

void ActiveTestingSession::IssueNextBatch() {
  pending_.reset();
  if (state_.budget_remaining == 0 || state_.unvetted.empty()) return;
  std::vector<PairPriority> priorities =
      PairPriorities(*dataset_, *ranking_, posteriors_, state_.unvetted,
                     config_.strategy, config_.aggregation, rng_);
  std::vector<std::string> batch =
      SelectBatch(state_, std::move(priorities), config_.batch_size);
  if (batch.empty()) return;
  pending_ = PendingBatch{"batch-" + std::to_string(++batches_issued_),
                          std::move(batch), /*initial=*/false};
}

void ActiveTestingSession::Submit(const std::string& batch_id,
                                  const BatchLabels& labels) {
  if (!pending_ || pending_->batch_id != batch_id) {
    throw ConflictError("batch '" + batch_id + "' is not the pending batch");
  }
  const std::size_t p = dataset_->num_relations();
  for (const std::string& pair_id : pending_->pairs) {
    const auto it = labels.find(pair_id);
    if (it == labels.end()) {
      throw ValidationError("labels missing for pair '" + pair_id + "'");
    }
    if (it->second.size() != p) {
      throw ValidationError("labels for pair '" + pair_id + "' have " +
                            std::to_string(it->second.size()) +
                            " entries, expected " + std::to_string(p));
    }
    for (Label label : it->second) {
      if (label > 1) {
        throw ValidationError("labels for pair '" + pair_id +
                              "' must be 0 or 1");
      }
    }
  }
  if (labels.size() != pending_->pairs.size()) {
    for (const auto& [pair_id, row] : labels) {
      if (std::find(pending_->pairs.begin(), pending_->pairs.end(), pair_id) ==
          pending_->pairs.end()) {
        throw ValidationError("pair '" + pair_id + "' is not in the batch");
      }
    }
  }

  // A failure leaves *this untouched.
  ActiveTestingSession next = *this;
  const PendingBatch batch = *next.pending_;
  for (const std::string& pair_id : batch.pairs) {
    next.state_.unvetted.erase(pair_id);
    next.state_.vetted[pair_id] = labels.at(pair_id);
  }
  if (!batch.initial) next.state_.budget_remaining -= batch.pairs.size();
  next.Refit();

  IterationRecord record;
  record.iteration = batch.initial ? 0 : next.state_.history.size() + 1;
  record.batch = batch.pairs;
  record.budget_remaining = next.state_.budget_remaining;
  record.metrics = next.metrics_;
  record.metrics.curve = {};
  record.noise = next.model_.noise;
  if (batch.initial) {
    next.state_.seed = std::move(record);
  } else {
    next.state_.history.push_back(std::move(record));
  }
  next.IssueNextBatch();
  *this = std::move(next);
}

void ActiveTestingSession::Step(Annotator& annotator) {
  if (!pending_) return;
  const BatchLabels labels = annotator.Annotate(*dataset_, pending_->pairs);
  Submit(pending_->batch_id, labels);
}

void ActiveTestingSession::Reselect(std::size_t batch_size) {
  if (batch_size == 0) throw ValidationError("batch size must be at least 1");
  if (!pending_ || pending_->initial) return;
  config_.batch_size = batch_size;
  IssueNextBatch();
}

SessionSnapshot ActiveTestingSession::Snapshot() const {
  return SessionSnapshot{config_, state_, rng_.Serialize(), pending_,
                         batches_issued_};
}

EvaluationReport ActiveTestingSession::Report(bool include_oracle) const {
  EvaluationReport report;
  report.ks = config_.ks;
  report.held_out =
      SafeMetrics(LabelVector(*dataset_, *ranking_, LabelSource::kNoisy),
                  config_.ks, MetricSource::kHeldOut);
  report.expected = metrics_;
  report.seed = state_.seed;
  report.iterations = state_.history;
  if (include_oracle && dataset_->has_oracle()) {
    report.oracle =
        SafeMetrics(LabelVector(*dataset_, *ranking_, LabelSource::kOracle),
                    config_.ks, MetricSource::kOracle);
    const PrCurve& oracle_curve = report.oracle->curve;
    if (!oracle_curve.points.empty() && !report.expected.curve.points.empty()) {
      report.expected_distance =
          CurveDistance(report.expected.curve, oracle_curve);
    }
    if (!oracle_curve.points.empty() && !report.held_out.curve.points.empty()) {
      report.held_out_distance =
          CurveDistance(report.held_out.curve, oracle_curve);
    }
  }
  return report;
}

EvaluationReport RunToCompletion(ActiveTestingSession& session,
                                 Annotator& annotator, bool track_reference) {
  const bool tracking = track_reference && session.dataset().has_oracle();
  PrCurve reference;
  if (tracking) {
    const std::vector<double> oracle = LabelVector(
        session.dataset(), session.ranking(), LabelSource::kOracle);
    reference = SafeMetrics(oracle, {}, MetricSource::kOracle).curve;
  }
  const auto distance = [&]() -> std::optional<double> {
    if (reference.points.empty() || session.metrics().curve.points.empty()) {
      return std::nullopt;
    }
    return CurveDistance(session.metrics().curve, reference);
  };

  // Distance at the state before the first budgeted iteration.
  std::optional<double> initial_distance;
  std::map<std::size_t, double> distances;
  const bool fresh = session.state().history.empty();
  if (tracking && fresh && (session.done() || !session.pending()->initial)) {
    initial_distance = distance();
  }
  while (!session.done()) {
    const bool initial = session.pending()->initial;
    session.Step(annotator);
    if (!tracking) continue;
    if (initial) {
      initial_distance = distance();
    } else if (auto d = distance()) {
      distances[session.state().history.back().iteration] = *d;
    }
  }

  EvaluationReport report = session.Report(/*include_oracle=*/tracking);
  report.initial_distance = initial_distance;
  if (report.seed) report.seed->reference_distance = initial_distance;
  for (IterationRecord& record : report.iterations) {
    const auto it = distances.find(record.iteration);
    if (it != distances.end()) record.reference_distance = it->second;
  }
  return report;
}

EvaluationReport RunActiveTesting(
    std::shared_ptr<const PredictionDataset> dataset,
    const ActiveTestingConfig& config, Annotator& annotator) {
  ActiveTestingSession session =
      ActiveTestingSession::Start(std::move(dataset), config);
  return RunToCompletion(session, annotator);
}

}  // namespace activetest
