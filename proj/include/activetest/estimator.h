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

// Posterior over the latent true label of every cell.
//
// Vetted cells are point masses at their observed label. For an unvetted cell
// with noisy label y and score s the posterior is
//
//   p(z=1 | y, s) = p(y|z=1) p(z=1|s) / sum_v p(y|z=v) p(z=v|s)
//
// where p(y|z) is a smoothed frequency table fitted on vetted cells and
// p(z|s) is a per-relation logistic regression on logit(s). The noisy label is
// assumed conditionally independent of the score given the true label.

#ifndef ACTIVETEST_ESTIMATOR_H_
#define ACTIVETEST_ESTIMATOR_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "activetest/dataset.h"

namespace activetest {

// Vetted pairs: pair_id -> observed true labels (one per relation).
using VettedLabels = std::map<std::string, LabelRow>;

enum class NoiseScope {
  kPerRelation,  // One p(y|z) table per relation.
  kGlobal,       // One table pooled over all relations, shared.
};

struct EstimatorOptions {
  double smoothing_alpha = 1.0;   // Laplace smoothing of p(y|z).
  double l2_weight = 1.0;         // L2 strength on the regression slope.
  int max_iterations = 500;       // Gradient ascent cap.
  double gradient_tolerance = 1e-8;
  int min_fit_examples = 4;       // Below this, use a constant calibrator.
  NoiseScope noise_scope = NoiseScope::kPerRelation;

  bool operator==(const EstimatorOptions&) const = default;
};

struct VettedCell {
  double score;
  Label noisy;
  Label truth;
};

// Vetted cells grouped by relation, in dataset pair order.
using VettedCells = std::vector<std::vector<VettedCell>>;

// Throws ValidationError if a vetted pair id is unknown or its label row has
// the wrong length.
VettedCells CollectVettedCells(const PredictionDataset& dataset,
                               const VettedLabels& vetted);

struct NoiseCounts {
  int z1 = 0;     // Vetted cells with z = 1.
  int y1_z1 = 0;  // ... of which y = 1.
  int z0 = 0;
  int y1_z0 = 0;

  bool operator==(const NoiseCounts&) const = default;
};

struct NoiseRates {
  double y1_given_z1 = 0.5;
  double y1_given_z0 = 0.5;
  NoiseCounts counts;

  // p(y | z) for y, z in {0,1}.
  double Likelihood(Label y, Label z) const;

  bool operator==(const NoiseRates&) const = default;
};

struct NoiseTable {
  std::vector<NoiseRates> per_relation;

  bool operator==(const NoiseTable&) const = default;
};

// (count + alpha) / (total + 2 alpha); 0.5 when total is zero.
double SmoothedFrequency(int count, int total, double alpha);

NoiseTable FitNoiseTable(const VettedCells& cells,
                         const EstimatorOptions& options = {});

// p(z=1|s) = sigmoid(weight * logit(s) + bias), or fallback if set.
struct ScoreCalibrator {
  double weight = 0.0;
  double bias = 0.0;
  std::optional<double> fallback;
  int iterations = 0;
  double gradient_norm = 0.0;

  double Prior(double score) const;

  bool operator==(const ScoreCalibrator&) const = default;
};

// L2-regularised Bernoulli log-likelihood of targets given features,
//   J(w, b) = sum_i [z_i t_i - log(1 + e^{t_i})] - l2/2 w^2,  t_i = w x_i + b.
// The slope is regularised, the intercept is not.
class LogisticObjective {
 public:
  LogisticObjective(std::vector<double> features, std::vector<double> targets,
                    double l2_weight);

  double Value(double weight, double bias) const;
  // Returns {dJ/dw, dJ/db}.
  std::pair<double, double> Gradient(double weight, double bias) const;

  std::size_t size() const { return features_.size(); }

 private:
  std::vector<double> features_;
  std::vector<double> targets_;
  double l2_weight_;
  mutable std::vector<double> scratch_;
};

double Logit(double p);
double Sigmoid(double t);

// Throws ValidationError on non-finite scores.
ScoreCalibrator FitCalibrator(std::span<const VettedCell> cells,
                              const EstimatorOptions& options = {});

struct PosteriorModel {
  NoiseTable noise;
  std::vector<ScoreCalibrator> calibrators;  // One per relation.

  bool operator==(const PosteriorModel&) const = default;
};

PosteriorModel FitPosteriorModel(const PredictionDataset& dataset,
                                 const VettedLabels& vetted,
                                 const EstimatorOptions& options = {});

// Model with no vetted data: every calibrator and noise rate at 0.5.
PosteriorModel UniformModel(std::size_t num_relations);

// p(z=1 | y, s) by the two-term Bayes quotient.
double PosteriorCell(Label noisy, double score, std::size_t relation,
                     const PosteriorModel& model);

// q[i] = p(z'_i = 1 | Theta) in rank order; vetted cells are exactly 0 or 1.
struct PosteriorTable {
  std::vector<double> q;
  std::vector<bool> vetted;
};

// Throws ValidationError if `vetted` references an unknown pair.
PosteriorTable EstimateAll(const PredictionDataset& dataset,
                           const RankedList& ranking,
                           const VettedLabels& vetted,
                           const PosteriorModel& model);

}  // namespace activetest

#endif  // ACTIVETEST_ESTIMATOR_H_
