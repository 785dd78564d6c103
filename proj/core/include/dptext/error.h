//
// Copyright 2026 The DPText Authors
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
//

#ifndef DPTEXT_ERROR_H_
#define DPTEXT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dptext {

// Failure categories raised across the library. The CLI maps these onto its
// exit-code contract, so new codes must be added to that table as well.
enum class ErrorCode {
  kInvalidArgument,
  kInvalidSpec,
  kInvalidDimension,
  kEmptyDocument,
  kShape,
  kIndex,
  kDomain,
  kNonFinite,
  kParse,
  kSchema,
  kBoundViolation,
  kInsufficientSamples,
  kDivergence,
  kLengthMismatch,
  kMissingTags,
  kIo,
  kIntegrity,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dptext

#endif  // DPTEXT_ERROR_H_
