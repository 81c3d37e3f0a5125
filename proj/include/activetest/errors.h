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

#ifndef ACTIVETEST_ERRORS_H_
#define ACTIVETEST_ERRORS_H_

#include <stdexcept>
#include <string>

namespace activetest {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad scores, unknown pairs, out-of-range K, etc.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// File system or serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// A submission referenced a batch that is no longer pending.
class ConflictError : public Error {
 public:
  using Error::Error;
};

// An annotator could not produce labels for a batch. Retryable.
class AnnotatorError : public Error {
 public:
  using Error::Error;
};

}  // namespace activetest

#endif  // ACTIVETEST_ERRORS_H_
