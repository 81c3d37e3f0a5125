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

// Compiled with -mavx2 (no -mfma). Only reached after a runtime CPU check.

#include <immintrin.h>

#include <cassert>
#include <cstddef>

#include "activetest/kernels.h"

namespace activetest::kernels::avx2 {

void BayesPosterior(std::span<const double> prior,
                    std::span<const double> lik_z1,
                    std::span<const double> lik_z0, std::span<double> out) {
  assert(prior.size() == out.size() && lik_z1.size() == out.size() &&
         lik_z0.size() == out.size());
  const std::size_t n = out.size();
  const std::size_t blocked = n / 4 * 4;
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t i = 0; i < blocked; i += 4) {
    const __m256d p = _mm256_loadu_pd(prior.data() + i);
    const __m256d l1 = _mm256_loadu_pd(lik_z1.data() + i);
    const __m256d l0 = _mm256_loadu_pd(lik_z0.data() + i);
    const __m256d joint1 = _mm256_mul_pd(l1, p);
    const __m256d joint0 = _mm256_mul_pd(l0, _mm256_sub_pd(one, p));
    _mm256_storeu_pd(out.data() + i,
                     _mm256_div_pd(joint1, _mm256_add_pd(joint1, joint0)));
  }
  for (std::size_t i = blocked; i < n; ++i) {
    const double joint1 = lik_z1[i] * prior[i];
    const double joint0 = lik_z0[i] * (1.0 - prior[i]);
    out[i] = joint1 / (joint1 + joint0);
  }
}

void BernoulliVariance(std::span<const double> q, std::span<double> out) {
  assert(q.size() == out.size());
  const std::size_t n = out.size();
  const std::size_t blocked = n / 4 * 4;
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t i = 0; i < blocked; i += 4) {
    const __m256d v = _mm256_loadu_pd(q.data() + i);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_mul_pd(v, _mm256_sub_pd(one, v)));
  }
  for (std::size_t i = blocked; i < n; ++i) out[i] = q[i] * (1.0 - q[i]);
}

void Affine(std::span<const double> x, double slope, double intercept,
            std::span<double> out) {
  assert(x.size() == out.size());
  const std::size_t n = out.size();
  const std::size_t blocked = n / 4 * 4;
  const __m256d a = _mm256_set1_pd(slope);
  const __m256d b = _mm256_set1_pd(intercept);
  for (std::size_t i = 0; i < blocked; i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_mul_pd(a, v), b));
  }
  for (std::size_t i = blocked; i < n; ++i) out[i] = slope * x[i] + intercept;
}

DotSum WeightedDotSum(std::span<const double> weights,
                      std::span<const double> values) {
  assert(weights.size() == values.size());
  const std::size_t n = weights.size();
  const std::size_t blocked = n / 4 * 4;
  __m256d dot = _mm256_setzero_pd();
  __m256d sum = _mm256_setzero_pd();
  for (std::size_t i = 0; i < blocked; i += 4) {
    const __m256d w = _mm256_loadu_pd(weights.data() + i);
    const __m256d v = _mm256_loadu_pd(values.data() + i);
    dot = _mm256_add_pd(dot, _mm256_mul_pd(w, v));
    sum = _mm256_add_pd(sum, w);
  }
  // (l0 + l2) + (l1 + l3)
  const auto fold = [](__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  };
  DotSum result{fold(dot), fold(sum)};
  for (std::size_t i = blocked; i < n; ++i) {
    result.dot += weights[i] * values[i];
    result.sum += weights[i];
  }
  return result;
}

}  // namespace activetest::kernels::avx2
