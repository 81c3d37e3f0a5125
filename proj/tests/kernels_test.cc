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

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "activetest/random.h"
#include "gtest/gtest.h"

namespace activetest::kernels {
namespace {

std::vector<double> RandomVector(Rng& rng, std::size_t n, double lo,
                                 double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * rng.Uniform();
  return v;
}

TEST(ScalarKernels, BayesPosteriorMatchesTheFormula) {
  Rng rng(1);
  const std::size_t n = 37;
  const auto prior = RandomVector(rng, n, 0.0, 1.0);
  const auto l1 = RandomVector(rng, n, 0.01, 1.0);
  const auto l0 = RandomVector(rng, n, 0.01, 1.0);
  std::vector<double> out(n);
  scalar::BayesPosterior(prior, l1, l0, out);
  for (std::size_t i = 0; i < n; ++i) {
    const double num = l1[i] * prior[i];
    EXPECT_EQ(out[i], num / (num + l0[i] * (1.0 - prior[i])));
  }
}

TEST(ScalarKernels, WorkedPosteriorExample) {
  // p(z=1|s)=0.4, p(y=0|z=1)=0.3, p(y=0|z=0)=0.95, observed y=0.
  const std::vector<double> prior = {0.4};
  const std::vector<double> l1 = {0.3};
  const std::vector<double> l0 = {0.95};
  std::vector<double> out(1);
  scalar::BayesPosterior(prior, l1, l0, out);
  EXPECT_NEAR(out[0], 0.12 / (0.12 + 0.57), 1e-15);
  EXPECT_NEAR(out[0], 0.1739130434782609, 1e-15);
}

TEST(ScalarKernels, BernoulliVarianceAndAffine) {
  const std::vector<double> q = {0.0, 0.25, 0.5, 1.0};
  std::vector<double> var(4);
  scalar::BernoulliVariance(q, var);
  EXPECT_EQ(var, (std::vector<double>{0.0, 0.1875, 0.25, 0.0}));
  std::vector<double> y(4);
  scalar::Affine(q, 2.0, -1.0, y);
  EXPECT_EQ(y, (std::vector<double>{-1.0, -0.5, 0.0, 1.0}));
}

TEST(ScalarKernels, WeightedDotSumIsAccurate) {
  Rng rng(2);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
    const auto w = RandomVector(rng, n, -1.0, 1.0);
    const auto v = RandomVector(rng, n, -3.0, 3.0);
    long double dot = 0.0L, sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      dot += static_cast<long double>(w[i]) * v[i];
      sum += w[i];
    }
    const DotSum got = scalar::WeightedDotSum(w, v);
    EXPECT_NEAR(got.dot, static_cast<double>(dot), 1e-12) << n;
    EXPECT_NEAR(got.sum, static_cast<double>(sum), 1e-12) << n;
  }
}

TEST(Dispatch, ActiveIsaIsSupported) {
  const Isa active = ActiveIsa();
  if (DetectIsa() == Isa::kScalar) {
    EXPECT_EQ(active, Isa::kScalar);
  }
  EXPECT_EQ(std::string(IsaName(Isa::kScalar)), "scalar");
  EXPECT_EQ(std::string(IsaName(Isa::kAvx2)), "avx2");
}

#if defined(ACTIVETEST_HAVE_AVX2)

bool BitwiseEqual(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

class Avx2Equivalence : public ::testing::TestWithParam<std::size_t> {
 protected:
  void SetUp() override {
    if (DetectIsa() != Isa::kAvx2) GTEST_SKIP() << "CPU lacks AVX2";
  }
};

TEST_P(Avx2Equivalence, BayesPosterior) {
  Rng rng(100 + GetParam());
  const std::size_t n = GetParam();
  // Offset views exercise unaligned starts.
  for (std::size_t offset : {0u, 1u, 3u}) {
    const auto prior = RandomVector(rng, n + offset, 1e-9, 1.0 - 1e-9);
    const auto l1 = RandomVector(rng, n + offset, 0.001, 1.0);
    const auto l0 = RandomVector(rng, n + offset, 0.001, 1.0);
    std::vector<double> a(n), b(n);
    const auto view = [&](const std::vector<double>& v) {
      return std::span<const double>(v).subspan(offset, n);
    };
    scalar::BayesPosterior(view(prior), view(l1), view(l0), a);
    avx2::BayesPosterior(view(prior), view(l1), view(l0), b);
    EXPECT_TRUE(BitwiseEqual(a, b)) << "n=" << n << " offset=" << offset;
  }
}

TEST_P(Avx2Equivalence, BernoulliVariance) {
  Rng rng(200 + GetParam());
  const auto q = RandomVector(rng, GetParam(), 0.0, 1.0);
  std::vector<double> a(q.size()), b(q.size());
  scalar::BernoulliVariance(q, a);
  avx2::BernoulliVariance(q, b);
  EXPECT_TRUE(BitwiseEqual(a, b));
}

TEST_P(Avx2Equivalence, Affine) {
  Rng rng(300 + GetParam());
  const auto x = RandomVector(rng, GetParam(), -20.0, 20.0);
  std::vector<double> a(x.size()), b(x.size());
  scalar::Affine(x, 1.7853, -0.3141, a);
  avx2::Affine(x, 1.7853, -0.3141, b);
  EXPECT_TRUE(BitwiseEqual(a, b));
}

TEST_P(Avx2Equivalence, WeightedDotSum) {
  Rng rng(400 + GetParam());
  const auto w = RandomVector(rng, GetParam(), -1.0, 1.0);
  const auto v = RandomVector(rng, GetParam(), -1e3, 1e3);
  const DotSum a = scalar::WeightedDotSum(w, v);
  const DotSum b = avx2::WeightedDotSum(w, v);
  EXPECT_EQ(std::memcmp(&a.dot, &b.dot, sizeof(double)), 0);
  EXPECT_EQ(std::memcmp(&a.sum, &b.sum, sizeof(double)), 0);
}

INSTANTIATE_TEST_SUITE_P(Lengths, Avx2Equivalence,
                         ::testing::Values(0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16,
                                           17, 31, 64, 100, 1023, 5000));

#endif  // ACTIVETEST_HAVE_AVX2

}  // namespace
}  // namespace activetest::kernels
