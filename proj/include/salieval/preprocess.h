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

#ifndef SALIEVAL_PREPROCESS_H_
#define SALIEVAL_PREPROCESS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "salieval/core.h"

namespace salieval {

using Rgb = std::array<uint8_t, 3>;

// 8-bit RGB, row-major, channels interleaved.
class RgbImage {
 public:
  RgbImage(int width, int height, std::vector<uint8_t> channels);
  static RgbImage Filled(int width, int height, Rgb color);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const uint8_t> channels() const { return channels_; }
  Rgb at(int r, int c) const {
    const size_t i = (static_cast<size_t>(r) * width_ + c) * 3;
    return {channels_[i], channels_[i + 1], channels_[i + 2]};
  }
  bool SameShape(const RgbImage& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }
  bool operator==(const RgbImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<uint8_t> channels_;
};

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

// CIELAB pixels (D65 white), row-major.
class LabImage {
 public:
  LabImage(int width, int height, std::vector<Lab> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const Lab> pixels() const { return pixels_; }
  const Lab& at(int r, int c) const {
    return pixels_[static_cast<size_t>(r) * width_ + c];
  }

 private:
  int width_;
  int height_;
  std::vector<Lab> pixels_;
};

Lab SrgbToLab(Rgb rgb);
Rgb LabToSrgb(const Lab& lab);

LabImage RgbToLab(const RgbImage& img);
RgbImage LabToRgb(const LabImage& img);

struct ClaheParams {
  int tiles_x = 8;
  int tiles_y = 8;
  double clip_limit = 2.0;
};

// Number of histogram bins L is quantized into.
inline constexpr int kLightnessBins = 256;

// Contrast-limited adaptive equalization of the L channel; a and b pass
// through untouched.
LabImage ClaheLab(const LabImage& img, const ClaheParams& params);

// RgbToLab -> ClaheLab -> LabToRgb.
RgbImage ClaheL(const RgbImage& img, const ClaheParams& params);

// 1 where every channel lies in [lower, upper].
BinaryMask ColorRangeMask(const RgbImage& img, Rgb lower, Rgb upper);

// Square-element morphology; pixels outside the image read as 0.
BinaryMask Dilate(const BinaryMask& mask, int kernel);
BinaryMask Erode(const BinaryMask& mask, int kernel);
// Sets every 0-pixel that is not 4-connected to the border through 0-pixels.
BinaryMask FillHoles(const BinaryMask& mask);
// Closing, then opening, then optional hole filling.
BinaryMask MorphRefine(const BinaryMask& mask, int kernel, bool fill_holes);

// Zeroes pixels where the mask is 0.
RgbImage ApplyMask(const RgbImage& img, const BinaryMask& mask);

// clamp(round(alpha * v + beta), 0, 255) per channel.
RgbImage LinearContrast(const RgbImage& img, double alpha, double beta);

// clamp(round(weight * enhanced + (1 - weight) * original), 0, 255).
RgbImage WeightedBlend(const RgbImage& original, const RgbImage& enhanced,
                       double weight);

enum class PreprocessMethod { kRangeMorph, kClahe, kClaheBlend };

std::string_view PreprocessMethodName(PreprocessMethod method);
std::optional<PreprocessMethod> ParsePreprocessMethod(std::string_view name);

struct PreprocessParams {
  ClaheParams clahe;
  int kernel = 3;
  bool fill_holes = true;
  double alpha = 1.0;
  double beta = 0.0;
  double blend_weight = 0.5;
  Rgb lower{0, 0, 0};
  Rgb upper{255, 255, 255};
};

// range_morph: ColorRangeMask -> MorphRefine -> ApplyMask -> LinearContrast
// clahe:       ClaheL
// clahe_blend: ClaheL -> WeightedBlend(original, .) -> LinearContrast
RgbImage RunPreprocess(const RgbImage& img, PreprocessMethod method,
                       const PreprocessParams& params);

}  // namespace salieval

#endif  // SALIEVAL_PREPROCESS_H_
