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

#ifndef SALIEVAL_CORE_H_
#define SALIEVAL_CORE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "salieval/errors.h"

namespace salieval {

// Pixel rectangle, origin top-left, inclusive on both ends.
struct BoundingBox {
  int min_r = 0;
  int min_c = 0;
  int max_r = 0;
  int max_c = 0;

  int64_t Area() const {
    return int64_t{max_r - min_r + 1} * int64_t{max_c - min_c + 1};
  }
  bool operator==(const BoundingBox&) const = default;
};

// Raised when a box does not fit its image; keeps the offending box.
class BoxOutOfBoundsError : public Error {
 public:
  BoxOutOfBoundsError(const BoundingBox& box, int width, int height);

  const BoundingBox& box() const { return box_; }

 private:
  BoundingBox box_;
};

// Dense row-major grid of scores in [0, 1].
class SaliencyMap {
 public:
  SaliencyMap(int width, int height, std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  int64_t size() const { return static_cast<int64_t>(values_.size()); }
  std::span<const double> values() const { return values_; }
  double at(int r, int c) const {
    return values_[static_cast<size_t>(r) * width_ + c];
  }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

// Dense row-major grid of {0, 1} labels; 1 marks the region of interest.
class BinaryMask {
 public:
  BinaryMask(int width, int height, std::vector<uint8_t> values);

  static BinaryMask Zeros(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  int64_t size() const { return static_cast<int64_t>(values_.size()); }
  std::span<const uint8_t> values() const { return values_; }
  uint8_t at(int r, int c) const {
    return values_[static_cast<size_t>(r) * width_ + c];
  }
  bool SameShape(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_;
  int height_;
  std::vector<uint8_t> values_;
};

struct MaskCounts {
  int64_t positives = 0;
  int64_t negatives = 0;
};

// Min-max rescales raw scores to [0, 1]. A constant grid maps to all zeros.
SaliencyMap NormalizeSaliency(int width, int height,
                              std::span<const double> raw);

BinaryMask RasterizeBox(const BoundingBox& box, int width, int height);

// Pixelwise OR of equally shaped masks.
BinaryMask UnionMasks(std::span<const BinaryMask> masks);

// |inner & outer| / |inner|.
double Containment(const BinaryMask& inner, const BinaryMask& outer);

MaskCounts CountMask(const BinaryMask& mask);

}  // namespace salieval

#endif  // SALIEVAL_CORE_H_
