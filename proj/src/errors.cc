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

#include "salieval/errors.h"

#include <string>

namespace salieval {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidRaster: return "InvalidRaster";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kBoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kDegenerateMask: return "DegenerateMask";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kInvalidKernel: return "InvalidKernel";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kInsufficientSources: return "InsufficientSources";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

void RethrowWithContext(const Error& e, std::string_view context) {
  throw Error(e.code(), std::string(context) + ": " + e.what());
}

}  // namespace salieval
