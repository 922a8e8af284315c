// Copyright 2026 The bmsdp Authors
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

#ifndef BMSDP_ERROR_H_
#define BMSDP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace bmsdp {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kParse,
  kNotPsd,
  kRankTooSmall,
  kUnsupportedStructure,
  kEmptyRange,
  kNumericalFailure,
  kInfeasible,
  kNotStrictlyFeasible,
  kMaxIterations,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. Soft
// failures (iteration limits in inner loops) are flags on result structs.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error(ErrorCode::kParse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace bmsdp

#endif  // BMSDP_ERROR_H_
