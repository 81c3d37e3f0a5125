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

#ifndef ACTIVETEST_RANDOM_H_
#define ACTIVETEST_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace activetest {

// Seeded generator. Every variate is derived here from the raw mt19937_64
// stream without the standard distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // Uniform integer in [0, bound). Throws ValidationError if bound is 0.
  std::uint64_t Below(std::uint64_t bound);
  // Standard normal (Box-Muller, one variate per call).
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  // Text round trip of the full engine state.
  std::string Serialize() const;
  static Rng Deserialize(const std::string& state);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace activetest

#endif  // ACTIVETEST_RANDOM_H_
