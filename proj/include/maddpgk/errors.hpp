// Copyright 2026 The maddpgk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MADDPGK_ERRORS_HPP_
#define MADDPGK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace maddpgk {

// Bad shapes, counts or options supplied by the caller or a config file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A precondition of an operation was violated by the calling code.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical failure during training (non-finite loss, gradient or reward).
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Emits a one-line warning on stderr.
void log_warning(const std::string& message);

}  // namespace maddpgk

#endif  // MADDPGK_ERRORS_HPP_
