// Copyright 2026 The Salieval Authors. All Rights Reserved.
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

#ifndef SALIEVAL_ERRORS_H_
#define SALIEVAL_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace salieval {

enum class ErrorCode {
  kInvalidRaster,
  kInvalidInput,
  kBoxOutOfBounds,
  kShapeMismatch,
  kEmptyMask,
  kDegenerateMask,
  kImageTooSmall,
  kInvalidRange,
  kInvalidKernel,
  kUnknownCategory,
  kParseError,
  kFormatError,
  kEmptyGroundTruth,
  kInsufficientSources,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as this exception; callers branch on
// code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Re-throws `e` with `context` prepended to the message, keeping the code.
[[noreturn]] void RethrowWithContext(const Error& e, std::string_view context);

}  // namespace salieval

#endif  // SALIEVAL_ERRORS_H_
