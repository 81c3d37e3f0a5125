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

// Precision / recall at K over a rank-ordered label vector.
//
// Labels are reals in [0,1]: 0/1 entries give the exact metrics, a mix of
// vetted labels and posteriors gives the expected metrics. Expected recall is
// the ratio of the expected top-K count to the expected total count. Held-out
// evaluation is the same computation over the noisy labels.

#ifndef ACTIVETEST_METRICS_H_
#define ACTIVETEST_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "activetest/estimator.h"

namespace activetest {

struct PrPoint {
  double recall;
  double precision;

  bool operator==(const PrPoint&) const = default;
};

// One point per K = 1..size(); recall is non-decreasing.
struct PrCurve {
  std::vector<PrPoint> points;

  bool operator==(const PrCurve&) const = default;
};

enum class MetricSource { kHeldOut, kExpected, kOracle };

const char* MetricSourceName(MetricSource source);
MetricSource ParseMetricSource(const std::string& name);

struct MetricReport {
  MetricSource source = MetricSource::kExpected;
  std::vector<std::size_t> ks;
  std::vector<double> p_at_k;  // Parallel to ks.
  std::vector<double> r_at_k;
  PrCurve curve;               // May be empty in history snapshots.

  bool operator==(const MetricReport&) const = default;
};

// Throws ValidationError unless 1 <= k <= labels.size().
double PrecisionAtK(std::span<const double> labels, std::size_t k);

// Throws ValidationError if the labels sum to zero or k is out of range.
double RecallAtK(std::span<const double> labels, std::size_t k);

// Throws as RecallAtK.
PrCurve BuildPrCurve(std::span<const double> labels);
PrCurve BuildPrCurve(std::span<const double> labels, std::size_t max_rank);

// P@K and R@K for each K plus the full curve.
MetricReport ComputeMetrics(std::span<const double> labels,
                            const std::vector<std::size_t>& ks,
                            MetricSource source);

MetricReport ExpectedMetrics(const PosteriorTable& posteriors,
                             const std::vector<std::size_t>& ks);

inline constexpr std::size_t kCurveSamples = 20;

// Precision of a curve at the given recall, linearly interpolated between
// the first point reaching that recall and its predecessor.
double InterpolatePrecision(const PrCurve& curve, double recall);

// Euclidean norm of the precision difference sampled at kCurveSamples
// recall values equally spaced (end points included) over the shared recall
// range. Throws ValidationError if either curve is empty or the ranges are
// disjoint.
double CurveDistance(const PrCurve& a, const PrCurve& b,
                     std::size_t samples = kCurveSamples);

}  // namespace activetest

#endif  // ACTIVETEST_METRICS_H_
