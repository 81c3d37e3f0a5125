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

#include "activetest/random.h"

#include <cmath>
#include <vector>

#include "activetest/errors.h"
#include "gtest/gtest.h"

namespace activetest {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.Uniform();
    EXPECT_EQ(x, b.Uniform());
    differs |= x != c.Uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, SerializedStateContinuesTheStream) {
  Rng rng(9);
  for (int i = 0; i < 17; ++i) rng.Normal();
  Rng copy = Rng::Deserialize(rng.Serialize());
  EXPECT_EQ(copy, rng);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(rng.Uniform(), copy.Uniform());
    EXPECT_EQ(rng.Below(1000), copy.Below(1000));
  }
  EXPECT_THROW(Rng::Deserialize("not a state"), ValidationError);
}

TEST(Rng, UniformStaysInTheHalfOpenUnitInterval) {
  Rng rng(3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Standard error of the mean is sqrt(1/12/n) ~ 6.5e-4.
  EXPECT_NEAR(sum / n, 0.5, 4e-3);
}

TEST(Rng, BelowIsUniformOverItsRange) {
  Rng rng(4);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto x = rng.Below(7);
    ASSERT_LT(x, 7u);
    ++counts[x];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7, 400);
  EXPECT_EQ(rng.Below(1), 0u);
  EXPECT_THROW(rng.Below(0), ValidationError);
}

TEST(Rng, NormalHasUnitMomentsAndBernoulliItsRate) {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    ASSERT_TRUE(std::isfinite(z));
    sum += z;
    sq += z * z;
    hits += rng.Bernoulli(0.25);
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.25, 0.005);
}

}  // namespace
}  // namespace activetest
