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

// The activetest command line: simulate, evaluate, run, select, vet, compare
// and serve.

#ifndef ACTIVETEST_TOOLS_CLI_H_
#define ACTIVETEST_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace activetest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Runs one invocation. `args` excludes the program name. Returns the exit
// code: 0 on success, 1 on invalid input or usage, 2 on I/O failure.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace activetest::cli

#endif  // ACTIVETEST_TOOLS_CLI_H_
