// Copyright 2026 The slicesim Authors. All rights reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace slicesim {

// Bad argument to a numerical kernel (out-of-domain probability, distance...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid or infeasible configuration. `field` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// API misuse: step after terminal, dimension mismatch, empty sample...
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A simulation invariant was violated. Always a bug.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define SLICESIM_INVARIANT(cond, msg)                                  \
  do {                                                                 \
    if (!(cond)) {                                                     \
      throw ::slicesim::InvariantError(std::string("invariant: ") +    \
                                       (msg) + " [" #cond "]");        \
    }                                                                  \
  } while (0)

}  // namespace slicesim
