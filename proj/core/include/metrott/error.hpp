// Copyright 2026 The metrott Authors
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

#ifndef METROTT_ERROR_HPP_
#define METROTT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace metrott {

enum class ErrorCode {
  kInvalidArgument,
  kDistanceTooShort,
  kUnknownStation,
  kNonPositiveCapacity,
  kLineTooShort,
  kNonPositiveFactor,
  kConfigMismatch,
  kMissingParameter,
  kModeMismatch,
  kUnboundedTime,
  kNumericalFailure,
  kIoFailure,
  kParseError,
  kInfeasibleTimetable,
  kTimetableMismatch,
  kEmptyFrontier,
  kUnknownFixture,
  kSchemaError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace metrott

#endif  // METROTT_ERROR_HPP_
