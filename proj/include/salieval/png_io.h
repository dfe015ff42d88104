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

#ifndef SALIEVAL_PNG_IO_H_
#define SALIEVAL_PNG_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "salieval/core.h"
#include "salieval/preprocess.h"

namespace salieval {

// Decoded PNG samples, row-major, channels interleaved. 8-bit samples are
// stored widened to 16 bits.
struct PngRaster {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 gray, 2 gray+alpha, 3 RGB, 4 RGBA
  int bit_depth = 0;  // 8 or 16
  std::vector<uint16_t> samples;
};

// Palette and sub-byte images are expanded to 8 bits. Throws kIoError or
// kFormatError.
PngRaster ReadPng(const std::filesystem::path& path);

// Writes through a temporary file renamed into place.
void WritePng(const std::filesystem::path& path, const PngRaster& raster);

// Accepts 8-bit gray, RGB or RGBA (alpha dropped).
RgbImage ReadRgbPng(const std::filesystem::path& path);
void WriteRgbPng(const std::filesystem::path& path, const RgbImage& img);

// 16-bit gray, value round(v * 65535).
void WriteSaliencyPng(const std::filesystem::path& path,
                      const SaliencyMap& saliency);
// 8-bit gray, 0 or 255.
void WriteMaskPng(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace salieval

#endif  // SALIEVAL_PNG_IO_H_
