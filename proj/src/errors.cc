// Copyright 2026 The LGDP Stats Authors
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

#include "lgdp/errors.h"

namespace lgdp {

std::string_view CodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "INVALID_ARGUMENT";
    case ErrorCode::kOutOfRange:
      return "OUT_OF_RANGE";
    case ErrorCode::kDimensionMismatch:
      return "DIMENSION_MISMATCH";
    case ErrorCode::kNotSymmetric:
      return "NOT_SYMMETRIC";
    case ErrorCode::kNegativeEigenvalue:
      return "NEGATIVE_EIGENVALUE";
    case ErrorCode::kNonFiniteObjective:
      return "NON_FINITE_OBJECTIVE";
    case ErrorCode::kEnumerationTooLarge:
      return "ENUMERATION_TOO_LARGE";
    case ErrorCode::kZeroVariance:
      return "ZERO_VARIANCE";
    case ErrorCode::kDegenerateGroups:
      return "DEGENERATE_GROUPS";
    case ErrorCode::kNoAcceptingDelta:
      return "NO_ACCEPTING_DELTA";
    case ErrorCode::kMalformedCsv:
      return "MALFORMED_CSV";
    case ErrorCode::kJoinMismatch:
      return "JOIN_MISMATCH";
    case ErrorCode::kScenarioMismatch:
      return "SCENARIO_MISMATCH";
    case ErrorCode::kSchemaError:
      return "SCHEMA_ERROR";
    case ErrorCode::kFileNotFound:
      return "FILE_NOT_FOUND";
    case ErrorCode::kIoError:
      return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace lgdp
