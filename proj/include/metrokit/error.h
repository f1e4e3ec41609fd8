// Copyright 2026 The metrokit Authors
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

namespace metrokit {

enum class ErrorKind {
  kInvalidInput,
  kNotPsd,
  kInvalidModel,
  kDegenerateChannel,
  kNumericalFailure,
  kInvalidState,
  kInvalidKraus,
  kDomainError,
  kInvalidGauge,
  kNotApplicable,
  kInfeasible,
  kStepTooLarge,
  kIncreaseRegister,
  kIncreaseGrid,
  kInvalidPrior,
};

const char* error_kind_name(ErrorKind kind);

// Every library failure is reported through this type; `kind` lets callers
// (notably the CLI) map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace metrokit
