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

#include "salieval/core.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace salieval {
namespace {

void CheckDims(int width, int height, size_t count, const char* what) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidRaster,
                std::string(what) + " must be at least 1x1, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (count != static_cast<size_t>(width) * static_cast<size_t>(height)) {
    throw Error(ErrorCode::kInvalidRaster,
                std::string(what) + " has " + std::to_string(count) +
                    " values for a " + std::to_string(width) + "x" +
                    std::to_string(height) + " grid");
  }
}

std::string BoxText(const BoundingBox& box) {
  return "(" + std::to_string(box.min_r) + "," + std::to_string(box.min_c) +
         "," + std::to_string(box.max_r) + "," + std::to_string(box.max_c) +
         ")";
}

}  // namespace

BoxOutOfBoundsError::BoxOutOfBoundsError(const BoundingBox& box, int width,
                                         int height)
    : Error(ErrorCode::kBoxOutOfBounds,
            "box " + BoxText(box) + " does not fit a " +
                std::to_string(width) + "x" + std::to_string(height) +
                " image"),
      box_(box) {}

SaliencyMap::SaliencyMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  CheckDims(width_, height_, values_.size(), "saliency map");
  for (size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::kInvalidRaster,
                  "saliency value at index " + std::to_string(i) +
                      " is outside [0,1]: " + std::to_string(v));
    }
  }
}

BinaryMask::BinaryMask(int width, int height, std::vector<uint8_t> values)
    : width_(width), height_(height), values_(std::move(values)) {
  CheckDims(width_, height_, values_.size(), "mask");
  for (size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 1) {
      throw Error(ErrorCode::kInvalidRaster,
                  "mask value at index " + std::to_string(i) +
                      " is not 0 or 1: " + std::to_string(values_[i]));
    }
  }
}

BinaryMask BinaryMask::Zeros(int width, int height) {
  const size_t n = width > 0 && height > 0
                       ? static_cast<size_t>(width) * static_cast<size_t>(height)
                       : 0;
  return BinaryMask(width, height, std::vector<uint8_t>(n, 0));
}

SaliencyMap NormalizeSaliency(int width, int height,
                              std::span<const double> raw) {
  if (raw.empty()) {
    throw Error(ErrorCode::kInvalidRaster, "saliency grid is empty");
  }
  CheckDims(width, height, raw.size(), "raw saliency grid");
  for (size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw Error(ErrorCode::kInvalidRaster,
                  "raw saliency value at index " + std::to_string(i) +
                      " is not finite");
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(raw.size(), 0.0);
  if (hi > lo) {
    const double range = hi - lo;
    for (size_t i = 0; i < raw.size(); ++i) {
      // Clamp guards the last ulp; (hi - lo) / range is exactly 1 anyway.
      out[i] = std::clamp((raw[i] - lo) / range, 0.0, 1.0);
    }
  }
  return SaliencyMap(width, height, std::move(out));
}

BinaryMask RasterizeBox(const BoundingBox& box, int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidRaster, "image must be at least 1x1");
  }
  if (box.min_r < 0 || box.min_c < 0 || box.min_r > box.max_r ||
      box.min_c > box.max_c || box.max_r >= height || box.max_c >= width) {
    throw BoxOutOfBoundsError(box, width, height);
  }
  std::vector<uint8_t> values(static_cast<size_t>(width) * height, 0);
  for (int r = box.min_r; r <= box.max_r; ++r) {
    auto row = values.begin() + static_cast<ptrdiff_t>(r) * width;
    std::fill(row + box.min_c, row + box.max_c + 1, uint8_t{1});
  }
  return BinaryMask(width, height, std::move(values));
}

BinaryMask UnionMasks(std::span<const BinaryMask> masks) {
  if (masks.empty()) {
    throw Error(ErrorCode::kInvalidInput, "cannot union an empty mask list");
  }
  const BinaryMask& first = masks.front();
  std::vector<uint8_t> values(first.values().begin(), first.values().end());
  for (size_t m = 1; m < masks.size(); ++m) {
    if (!masks[m].SameShape(first)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "mask " + std::to_string(m) + " is " +
                      std::to_string(masks[m].width()) + "x" +
                      std::to_string(masks[m].height()) + ", expected " +
                      std::to_string(first.width()) + "x" +
                      std::to_string(first.height()));
    }
    const auto other = masks[m].values();
    for (size_t i = 0; i < values.size(); ++i) values[i] |= other[i];
  }
  return BinaryMask(first.width(), first.height(), std::move(values));
}

double Containment(const BinaryMask& inner, const BinaryMask& outer) {
  if (!inner.SameShape(outer)) {
    throw Error(ErrorCode::kShapeMismatch,
                "containment needs equally shaped masks");
  }
  const auto a = inner.values();
  const auto b = outer.values();
  int64_t inner_count = 0;
  int64_t both = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    inner_count += a[i];
    both += a[i] & b[i];
  }
  if (inner_count == 0) {
    throw Error(ErrorCode::kEmptyMask, "inner mask has no positive pixels");
  }
  return static_cast<double>(both) / static_cast<double>(inner_count);
}

MaskCounts CountMask(const BinaryMask& mask) {
  MaskCounts counts;
  for (uint8_t v : mask.values()) counts.positives += v;
  counts.negatives = mask.size() - counts.positives;
  return counts;
}

}  // namespace salieval
