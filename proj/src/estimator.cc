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

#include "activetest/estimator.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "activetest/errors.h"
#include "activetest/kernels.h"

namespace activetest {
namespace {

// Keeps calibrated priors strictly inside (0,1) after rounding.
constexpr double kPriorFloor = 1e-12;

double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double Norm(std::pair<double, double> g) {
  return std::hypot(g.first, g.second);
}

}  // namespace

double Logit(double p) { return std::log(p) - std::log1p(-p); }

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

VettedCells CollectVettedCells(const PredictionDataset& dataset,
                               const VettedLabels& vetted) {
  const std::size_t p = dataset.num_relations();
  std::vector<const LabelRow*> rows(dataset.num_pairs(), nullptr);
  for (const auto& [pair_id, labels] : vetted) {
    const auto index = dataset.FindPair(pair_id);
    if (!index) {
      throw ValidationError("vetted set references unknown pair '" + pair_id +
                            "'");
    }
    if (labels.size() != p) {
      throw ValidationError("vetted labels for pair '" + pair_id + "' have " +
                            std::to_string(labels.size()) +
                            " entries, expected " + std::to_string(p));
    }
    rows[*index] = &labels;
  }
  VettedCells cells(p);
  for (std::size_t i = 0; i < dataset.num_pairs(); ++i) {
    if (rows[i] == nullptr) continue;
    const EntityPair& pair = dataset.pair(i);
    for (std::size_t k = 0; k < p; ++k) {
      cells[k].push_back({pair.scores[k], pair.noisy_labels[k], (*rows[i])[k]});
    }
  }
  return cells;
}

double SmoothedFrequency(int count, int total, double alpha) {
  if (total == 0) return 0.5;
  return (count + alpha) / (total + 2.0 * alpha);
}

double NoiseRates::Likelihood(Label y, Label z) const {
  const double y1 = z ? y1_given_z1 : y1_given_z0;
  return y ? y1 : 1.0 - y1;
}

NoiseTable FitNoiseTable(const VettedCells& cells,
                         const EstimatorOptions& options) {
  std::vector<NoiseCounts> counts(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (const VettedCell& cell : cells[k]) {
      if (cell.truth) {
        ++counts[k].z1;
        counts[k].y1_z1 += cell.noisy;
      } else {
        ++counts[k].z0;
        counts[k].y1_z0 += cell.noisy;
      }
    }
  }
  if (options.noise_scope == NoiseScope::kGlobal) {
    NoiseCounts pooled;
    for (const NoiseCounts& c : counts) {
      pooled.z1 += c.z1;
      pooled.y1_z1 += c.y1_z1;
      pooled.z0 += c.z0;
      pooled.y1_z0 += c.y1_z0;
    }
    std::fill(counts.begin(), counts.end(), pooled);
  }
  NoiseTable table;
  table.per_relation.reserve(counts.size());
  for (const NoiseCounts& c : counts) {
    NoiseRates rates;
    rates.counts = c;
    rates.y1_given_z1 =
        SmoothedFrequency(c.y1_z1, c.z1, options.smoothing_alpha);
    rates.y1_given_z0 =
        SmoothedFrequency(c.y1_z0, c.z0, options.smoothing_alpha);
    table.per_relation.push_back(rates);
  }
  return table;
}

double ScoreCalibrator::Prior(double score) const {
  const double p = fallback ? *fallback : Sigmoid(weight * Logit(score) + bias);
  return std::clamp(p, kPriorFloor, 1.0 - kPriorFloor);
}

LogisticObjective::LogisticObjective(std::vector<double> features,
                                     std::vector<double> targets,
                                     double l2_weight)
    : features_(std::move(features)),
      targets_(std::move(targets)),
      l2_weight_(l2_weight),
      scratch_(features_.size()) {}

double LogisticObjective::Value(double weight, double bias) const {
  kernels::Affine(features_, weight, bias, scratch_);
  double log_likelihood = 0.0;
  for (std::size_t i = 0; i < scratch_.size(); ++i) {
    log_likelihood += targets_[i] * scratch_[i] - Softplus(scratch_[i]);
  }
  return log_likelihood - 0.5 * l2_weight_ * weight * weight;
}

std::pair<double, double> LogisticObjective::Gradient(double weight,
                                                      double bias) const {
  kernels::Affine(features_, weight, bias, scratch_);
  for (std::size_t i = 0; i < scratch_.size(); ++i) {
    scratch_[i] = targets_[i] - Sigmoid(scratch_[i]);
  }
  const kernels::DotSum residual = kernels::WeightedDotSum(scratch_, features_);
  return {residual.dot - l2_weight_ * weight, residual.sum};
}

ScoreCalibrator FitCalibrator(std::span<const VettedCell> cells,
                              const EstimatorOptions& options) {
  int positives = 0;
  for (const VettedCell& cell : cells) {
    if (!std::isfinite(cell.score)) {
      throw ValidationError("non-finite score in calibrator input");
    }
    positives += cell.truth;
  }
  const int n = static_cast<int>(cells.size());
  ScoreCalibrator calibrator;
  if (n < options.min_fit_examples || positives == 0 || positives == n) {
    calibrator.fallback =
        SmoothedFrequency(positives, n, options.smoothing_alpha);
    return calibrator;
  }

  // Optimise in standardised coordinates u = (x - mean) / scale. With
  // w' = w * scale and b' = b + w * mean the objective is unchanged if the
  // penalty on w' is l2 / scale^2.
  std::vector<double> features(cells.size());
  std::vector<double> targets(cells.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    features[i] = Logit(cells[i].score);
    targets[i] = cells[i].truth;
    mean += features[i];
  }
  mean /= n;
  double variance = 0.0;
  for (double x : features) variance += (x - mean) * (x - mean);
  const double scale = std::max(std::sqrt(variance / n), 1e-8);
  std::vector<double> standardized(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    standardized[i] = (features[i] - mean) / scale;
  }
  const LogisticObjective original(std::move(features), targets,
                                   options.l2_weight);
  const LogisticObjective objective(std::move(standardized), std::move(targets),
                                    options.l2_weight / (scale * scale));

  const auto to_original = [&](double w, double b) {
    const double weight = w / scale;
    return std::pair{weight, b - weight * mean};
  };
  // Chain rule back to (w, b); the stopping rule is stated there.
  const auto original_gradient = [&](std::pair<double, double> g) {
    return std::pair{g.first * scale + g.second * mean, g.second};
  };

  double w = 0.0;
  double b = Logit(SmoothedFrequency(positives, n, options.smoothing_alpha));
  double value = objective.Value(w, b);
  auto gradient = objective.Gradient(w, b);
  // The log-likelihood Hessian is bounded by n/4 (plus the penalty).
  double step =
      1.0 / (0.25 * n + options.l2_weight / (scale * scale) + 1.0);
  constexpr double kArmijo = 1e-4;
  constexpr double kValueRounding = 1e-13;
  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    if (Norm(original_gradient(gradient)) < options.gradient_tolerance) break;
    const double squared = gradient.first * gradient.first +
                           gradient.second * gradient.second;
    double next_w = w, next_b = b, next_value = value;
    std::optional<std::pair<double, double>> next_gradient;
    bool accepted = false;
    for (int halvings = 0; halvings < 60 && !accepted; ++halvings) {
      next_w = w + step * gradient.first;
      next_b = b + step * gradient.second;
      next_value = objective.Value(next_w, next_b);
      next_gradient.reset();
      if (next_value >= value + kArmijo * step * squared) {
        accepted = true;
      } else if (next_value >=
                 value - kValueRounding * (1.0 + std::abs(value))) {
        // Approximate Armijo condition on the directional derivative, used
        // once value differences fall below rounding.
        next_gradient = objective.Gradient(next_w, next_b);
        accepted = next_gradient->first * gradient.first +
                       next_gradient->second * gradient.second >=
                   -(1.0 - 2.0 * kArmijo) * squared;
      }
      if (!accepted) step *= 0.5;
    }
    if (!accepted) break;
    if (!next_gradient) next_gradient = objective.Gradient(next_w, next_b);
    // Barzilai-Borwein trial step for the next line search.
    const double dw = next_w - w, db = next_b - b;
    const double curvature = -(dw * (next_gradient->first - gradient.first) +
                               db * (next_gradient->second - gradient.second));
    const double trial = (dw * dw + db * db) / curvature;
    step = curvature > 0.0 && std::isfinite(trial) ? trial : 2.0 * step;
    w = next_w;
    b = next_b;
    value = next_value;
    gradient = *next_gradient;
  }

  const auto [weight, bias] = to_original(w, b);
  calibrator.weight = weight;
  calibrator.bias = bias;
  calibrator.iterations = iteration;
  calibrator.gradient_norm = Norm(original.Gradient(weight, bias));
  return calibrator;
}

PosteriorModel FitPosteriorModel(const PredictionDataset& dataset,
                                 const VettedLabels& vetted,
                                 const EstimatorOptions& options) {
  const VettedCells cells = CollectVettedCells(dataset, vetted);
  PosteriorModel model;
  model.noise = FitNoiseTable(cells, options);
  model.calibrators.reserve(cells.size());
  for (const auto& relation_cells : cells) {
    model.calibrators.push_back(FitCalibrator(relation_cells, options));
  }
  return model;
}

PosteriorModel UniformModel(std::size_t num_relations) {
  PosteriorModel model;
  model.noise.per_relation.assign(num_relations, NoiseRates{});
  ScoreCalibrator flat;
  flat.fallback = 0.5;
  model.calibrators.assign(num_relations, flat);
  return model;
}

double PosteriorCell(Label noisy, double score, std::size_t relation,
                     const PosteriorModel& model) {
  const double prior = model.calibrators[relation].Prior(score);
  const NoiseRates& rates = model.noise.per_relation[relation];
  const double joint1 = rates.Likelihood(noisy, 1) * prior;
  const double joint0 = rates.Likelihood(noisy, 0) * (1.0 - prior);
  return joint1 / (joint1 + joint0);
}

PosteriorTable EstimateAll(const PredictionDataset& dataset,
                           const RankedList& ranking,
                           const VettedLabels& vetted,
                           const PosteriorModel& model) {
  const std::size_t n = ranking.size();
  std::vector<const LabelRow*> rows(dataset.num_pairs(), nullptr);
  for (const auto& [pair_id, labels] : vetted) {
    const auto index = dataset.FindPair(pair_id);
    if (!index) {
      throw ValidationError("vetting state references unknown pair '" +
                            pair_id + "'");
    }
    if (labels.size() != dataset.num_relations()) {
      throw ValidationError("vetted labels for pair '" + pair_id +
                            "' have the wrong length");
    }
    rows[*index] = &labels;
  }

  std::vector<double> prior(n), lik_z1(n), lik_z0(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t cell = ranking.CellAt(pos);
    const std::size_t pair = dataset.PairOfCell(cell);
    const std::size_t relation = dataset.RelationOfCell(cell);
    const Label y = dataset.pair(pair).noisy_labels[relation];
    const NoiseRates& rates = model.noise.per_relation[relation];
    prior[pos] = model.calibrators[relation].Prior(ranking.scores()[pos]);
    lik_z1[pos] = rates.Likelihood(y, 1);
    lik_z0[pos] = rates.Likelihood(y, 0);
  }
  PosteriorTable table;
  table.q.resize(n);
  table.vetted.assign(n, false);
  kernels::BayesPosterior(prior, lik_z1, lik_z0, table.q);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t cell = ranking.CellAt(pos);
    const LabelRow* row = rows[dataset.PairOfCell(cell)];
    if (row == nullptr) continue;
    table.q[pos] = (*row)[dataset.RelationOfCell(cell)];
    table.vetted[pos] = true;
  }
  return table;
}

}  // namespace activetest
