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

#include "activetest/kernels.h"

#include <cstdlib>
#include <cstring>

namespace activetest::kernels {
namespace {

struct Table {
  void (*bayes)(std::span<const double>, std::span<const double>,
                std::span<const double>, std::span<double>);
  void (*variance)(std::span<const double>, std::span<double>);
  void (*affine)(std::span<const double>, double, double, std::span<double>);
  DotSum (*dot_sum)(std::span<const double>, std::span<const double>);
};

constexpr Table kScalarTable = {&scalar::BayesPosterior,
                                &scalar::BernoulliVariance, &scalar::Affine,
                                &scalar::WeightedDotSum};

#if defined(ACTIVETEST_HAVE_AVX2)
constexpr Table kAvx2Table = {&avx2::BayesPosterior, &avx2::BernoulliVariance,
                              &avx2::Affine, &avx2::WeightedDotSum};
#endif

Isa ResolveIsa() {
  const char* forced = std::getenv("ACTIVETEST_ISA");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    return Isa::kScalar;
  }
  return DetectIsa();
}

const Table& Dispatch() {
  static const Table& table = []() -> const Table& {
#if defined(ACTIVETEST_HAVE_AVX2)
    if (ResolveIsa() == Isa::kAvx2) return kAvx2Table;
#endif
    return kScalarTable;
  }();
  return table;
}

}  // namespace

const char* IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa DetectIsa() {
#if defined(ACTIVETEST_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::kAvx2;
#endif
  return Isa::kScalar;
}

Isa ActiveIsa() {
  static const Isa isa = ResolveIsa();
  return isa;
}

void BayesPosterior(std::span<const double> prior,
                    std::span<const double> lik_z1,
                    std::span<const double> lik_z0, std::span<double> out) {
  Dispatch().bayes(prior, lik_z1, lik_z0, out);
}

void BernoulliVariance(std::span<const double> q, std::span<double> out) {
  Dispatch().variance(q, out);
}

void Affine(std::span<const double> x, double slope, double intercept,
            std::span<double> out) {
  Dispatch().affine(x, slope, intercept, out);
}

DotSum WeightedDotSum(std::span<const double> weights,
                      std::span<const double> values) {
  return Dispatch().dot_sum(weights, values);
}

}  // namespace activetest::kernels
