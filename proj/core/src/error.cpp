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

#include "metrott/error.hpp"

namespace metrott {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDistanceTooShort: return "DistanceTooShort";
    case ErrorCode::kUnknownStation: return "UnknownStation";
    case ErrorCode::kNonPositiveCapacity: return "NonPositiveCapacity";
    case ErrorCode::kLineTooShort: return "LineTooShort";
    case ErrorCode::kNonPositiveFactor: return "NonPositiveFactor";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kMissingParameter: return "MissingParameter";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kUnboundedTime: return "UnboundedTime";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInfeasibleTimetable: return "InfeasibleTimetable";
    case ErrorCode::kTimetableMismatch: return "TimetableMismatch";
    case ErrorCode::kEmptyFrontier: return "EmptyFrontier";
    case ErrorCode::kUnknownFixture: return "UnknownFixture";
    case ErrorCode::kSchemaError: return "SchemaError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace metrott
