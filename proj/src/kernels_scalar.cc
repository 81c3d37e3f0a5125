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

#include <cassert>
#include <cstddef>

#include "activetest/kernels.h"

namespace activetest::kernels::scalar {

void BayesPosterior(std::span<const double> prior,
                    std::span<const double> lik_z1,
                    std::span<const double> lik_z0, std::span<double> out) {
  assert(prior.size() == out.size() && lik_z1.size() == out.size() &&
         lik_z0.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double joint1 = lik_z1[i] * prior[i];
    const double joint0 = lik_z0[i] * (1.0 - prior[i]);
    out[i] = joint1 / (joint1 + joint0);
  }
}

void BernoulliVariance(std::span<const double> q, std::span<double> out) {
  assert(q.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = q[i] * (1.0 - q[i]);
  }
}

void Affine(std::span<const double> x, double slope, double intercept,
            std::span<double> out) {
  assert(x.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = slope * x[i] + intercept;
  }
}

DotSum WeightedDotSum(std::span<const double> weights,
                      std::span<const double> values) {
  assert(weights.size() == values.size());
  // Four interleaved accumulators, folded as (l0 + l2) + (l1 + l3). This is
  // the lane layout of the vector variant.
  double dot[4] = {0.0, 0.0, 0.0, 0.0};
  double sum[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t blocked = weights.size() / 4 * 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    for (std::size_t lane = 0; lane < 4; ++lane) {
      const double product = weights[i + lane] * values[i + lane];
      dot[lane] = dot[lane] + product;
      sum[lane] = sum[lane] + weights[i + lane];
    }
  }
  DotSum result;
  result.dot = (dot[0] + dot[2]) + (dot[1] + dot[3]);
  result.sum = (sum[0] + sum[2]) + (sum[1] + sum[3]);
  for (std::size_t i = blocked; i < weights.size(); ++i) {
    result.dot += weights[i] * values[i];
    result.sum += weights[i];
  }
  return result;
}

}  // namespace activetest::kernels::scalar
