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

#include "activetest/metrics.h"

#include <algorithm>
#include <cmath>

#include "activetest/errors.h"

namespace activetest {
namespace {

void CheckRank(std::span<const double> labels, std::size_t k) {
  if (k < 1 || k > labels.size()) {
    throw ValidationError("K=" + std::to_string(k) + " out of range [1, " +
                          std::to_string(labels.size()) + "]");
  }
}

double Total(std::span<const double> labels) {
  double total = 0.0;
  for (double v : labels) total += v;
  if (!(total > 0.0)) {
    throw ValidationError("recall undefined: label vector sums to zero");
  }
  return total;
}

double PartialSum(std::span<const double> labels, std::size_t k) {
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += labels[i];
  return sum;
}

}  // namespace

const char* MetricSourceName(MetricSource source) {
  switch (source) {
    case MetricSource::kHeldOut:
      return "held-out";
    case MetricSource::kExpected:
      return "expected";
    case MetricSource::kOracle:
      return "oracle";
  }
  return "unknown";
}

MetricSource ParseMetricSource(const std::string& name) {
  if (name == "held-out") return MetricSource::kHeldOut;
  if (name == "expected") return MetricSource::kExpected;
  if (name == "oracle") return MetricSource::kOracle;
  throw ValidationError("unknown metric source '" + name + "'");
}

double PrecisionAtK(std::span<const double> labels, std::size_t k) {
  CheckRank(labels, k);
  return PartialSum(labels, k) / static_cast<double>(k);
}

double RecallAtK(std::span<const double> labels, std::size_t k) {
  CheckRank(labels, k);
  return PartialSum(labels, k) / Total(labels);
}

PrCurve BuildPrCurve(std::span<const double> labels) {
  return BuildPrCurve(labels, labels.size());
}

PrCurve BuildPrCurve(std::span<const double> labels, std::size_t max_rank) {
  if (max_rank > labels.size()) {
    throw ValidationError("max_rank exceeds label count");
  }
  const double total = Total(labels);
  PrCurve curve;
  curve.points.reserve(max_rank);
  double running = 0.0;
  for (std::size_t k = 1; k <= max_rank; ++k) {
    running += labels[k - 1];
    curve.points.push_back({running / total, running / static_cast<double>(k)});
  }
  return curve;
}

MetricReport ComputeMetrics(std::span<const double> labels,
                            const std::vector<std::size_t>& ks,
                            MetricSource source) {
  MetricReport report;
  report.source = source;
  report.ks = ks;
  for (std::size_t k : ks) {
    report.p_at_k.push_back(PrecisionAtK(labels, k));
    report.r_at_k.push_back(RecallAtK(labels, k));
  }
  report.curve = BuildPrCurve(labels);
  return report;
}

MetricReport ExpectedMetrics(const PosteriorTable& posteriors,
                             const std::vector<std::size_t>& ks) {
  return ComputeMetrics(posteriors.q, ks, MetricSource::kExpected);
}

double InterpolatePrecision(const PrCurve& curve, double recall) {
  const auto& points = curve.points;
  if (points.empty()) throw ValidationError("empty PR curve");
  if (recall <= points.front().recall) return points.front().precision;
  const auto it = std::lower_bound(
      points.begin(), points.end(), recall,
      [](const PrPoint& point, double r) { return point.recall < r; });
  if (it == points.end()) return points.back().precision;
  const PrPoint& hi = *it;
  const PrPoint& lo = *(it - 1);
  const double t = (recall - lo.recall) / (hi.recall - lo.recall);
  return lo.precision + t * (hi.precision - lo.precision);
}

double CurveDistance(const PrCurve& a, const PrCurve& b,
                     std::size_t samples) {
  if (a.points.empty() || b.points.empty()) {
    throw ValidationError("curve distance needs two non-empty curves");
  }
  if (samples < 2) throw ValidationError("need at least two sample points");
  const double lo = std::max(a.points.front().recall, b.points.front().recall);
  const double hi = std::min(a.points.back().recall, b.points.back().recall);
  if (lo > hi) {
    throw ValidationError("curves have disjoint recall ranges");
  }
  double squared = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double recall = lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(samples - 1);
    const double diff =
        InterpolatePrecision(a, recall) - InterpolatePrecision(b, recall);
    squared += diff * diff;
  }
  return std::sqrt(squared);
}

}  // namespace activetest
