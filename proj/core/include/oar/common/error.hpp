// Copyright 2026 The oarlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OAR_COMMON_ERROR_HPP
#define OAR_COMMON_ERROR_HPP

#include <stdexcept>
#include <string>

namespace oar {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Base class for recoverable runtime failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An answer-span outcome probe was requested for a response without a span.
class NoSpanError : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the given input (e.g. all-zero weights).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss, ratio or gradient.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Throws ContractViolation with `message` unless `condition` holds.
void require(bool condition, const std::string& message);

}  // namespace oar

#endif  // OAR_COMMON_ERROR_HPP
