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

#ifndef LGDP_ERRORS_H_
#define LGDP_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace lgdp {

// Machine-readable failure categories. The CLI prints CodeName() verbatim.
enum class ErrorCode {
  kInvalidArgument,
  kOutOfRange,
  kDimensionMismatch,
  kNotSymmetric,
  kNegativeEigenvalue,
  kNonFiniteObjective,
  kEnumerationTooLarge,
  kZeroVariance,
  kDegenerateGroups,
  kNoAcceptingDelta,
  kMalformedCsv,
  kJoinMismatch,
  kScenarioMismatch,
  kSchemaError,
  kFileNotFound,
  kIoError,
};

std::string_view CodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lgdp

#endif  // LGDP_ERRORS_H_
