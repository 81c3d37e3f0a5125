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

#ifndef ACTIVETEST_TESTS_TEST_UTIL_H_
#define ACTIVETEST_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "activetest/dataset.h"

namespace activetest::test {

inline EntityPair MakePair(const std::string& id, std::vector<double> scores,
                           LabelRow noisy,
                           std::optional<LabelRow> oracle = std::nullopt) {
  EntityPair pair;
  pair.pair_id = id;
  pair.head = id + "_h";
  pair.tail = id + "_t";
  pair.sentences = {"sentence about " + id};
  pair.scores = std::move(scores);
  pair.noisy_labels = std::move(noisy);
  pair.oracle_labels = std::move(oracle);
  return pair;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "activetest-XXXXXX")
            .string();
    path_ = mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ignored;
    std::filesystem::remove_all(path_, ignored);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string File(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }

 private:
  std::string path_;
};

}  // namespace activetest::test

#endif  // ACTIVETEST_TESTS_TEST_UTIL_H_
