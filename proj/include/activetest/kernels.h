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

// Data-parallel inner loops of the estimator and the vetting strategy.
//
// Each kernel has a portable scalar reference in `scalar::` and, on x86-64,
// an AVX2 variant in `avx2::`. The unqualified entry points dispatch once at
// first use based on the running CPU. Setting the environment variable
// ACTIVETEST_ISA=scalar forces the reference path.
//
// Elementwise kernels use only correctly rounded operations in a fixed order
// and never contract into FMA, so both variants agree bit for bit. The
// reduction kernel accumulates in four interleaved lanes in both variants and
// folds them in the same order, so it is bitwise identical as well.

#ifndef ACTIVETEST_KERNELS_H_
#define ACTIVETEST_KERNELS_H_

#include <span>

namespace activetest::kernels {

enum class Isa { kScalar, kAvx2 };

const char* IsaName(Isa isa);

// Best ISA supported by this build and CPU.
Isa DetectIsa();

// ISA used by the dispatching entry points (DetectIsa() unless overridden by
// ACTIVETEST_ISA).
Isa ActiveIsa();

struct DotSum {
  double dot = 0.0;  // sum(weights[i] * values[i])
  double sum = 0.0;  // sum(weights[i])
};

// out[i] = lik_z1[i] * prior[i] /
//          (lik_z1[i] * prior[i] + lik_z0[i] * (1 - prior[i]))
void BayesPosterior(std::span<const double> prior,
                    std::span<const double> lik_z1,
                    std::span<const double> lik_z0, std::span<double> out);

// out[i] = q[i] * (1 - q[i])
void BernoulliVariance(std::span<const double> q, std::span<double> out);

// out[i] = slope * x[i] + intercept
void Affine(std::span<const double> x, double slope, double intercept,
            std::span<double> out);

DotSum WeightedDotSum(std::span<const double> weights,
                      std::span<const double> values);

namespace scalar {
void BayesPosterior(std::span<const double> prior,
                    std::span<const double> lik_z1,
                    std::span<const double> lik_z0, std::span<double> out);
void BernoulliVariance(std::span<const double> q, std::span<double> out);
void Affine(std::span<const double> x, double slope, double intercept,
            std::span<double> out);
DotSum WeightedDotSum(std::span<const double> weights,
                      std::span<const double> values);
}  // namespace scalar

#if defined(ACTIVETEST_HAVE_AVX2)
namespace avx2 {
void BayesPosterior(std::span<const double> prior,
                    std::span<const double> lik_z1,
                    std::span<const double> lik_z0, std::span<double> out);
void BernoulliVariance(std::span<const double> q, std::span<double> out);
void Affine(std::span<const double> x, double slope, double intercept,
            std::span<double> out);
DotSum WeightedDotSum(std::span<const double> weights,
                      std::span<const double> values);
}  // namespace avx2
#endif

}  // namespace activetest::kernels

#endif  // ACTIVETEST_KERNELS_H_
