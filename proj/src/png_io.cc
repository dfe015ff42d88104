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

#include "salieval/png_io.h"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <system_error>

namespace salieval {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void OnPngError(png_structp png, png_const_charp message) {
  auto* out = static_cast<std::string*>(png_get_error_ptr(png));
  if (out != nullptr) *out = message;
  png_longjmp(png, 1);
}

void OnPngWarning(png_structp, png_const_charp) {}

}  // namespace

PngRaster ReadPng(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 ||
      png_sig_cmp(signature, 0, 8) != 0) {
    throw Error(ErrorCode::kFormatError, path.string() + " is not a PNG file");
  }

  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message,
                                           OnPngError, OnPngWarning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::kIoError, "libpng initialisation failed");
  }

  PngRaster raster;
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kFormatError,
                "cannot decode " + path.string() + ": " + message);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  raster.width = static_cast<int>(png_get_image_width(png, info));
  raster.height = static_cast<int>(png_get_image_height(png, info));
  raster.channels = png_get_channels(png, info);
  bit_depth = png_get_bit_depth(png, info);
  raster.bit_depth = bit_depth;
  const size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * raster.height);
  rows.resize(raster.height);
  for (int r = 0; r < raster.height; ++r) rows[r] = &buffer[row_bytes * r];
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const size_t per_row = static_cast<size_t>(raster.width) * raster.channels;
  raster.samples.resize(per_row * raster.height);
  for (int r = 0; r < raster.height; ++r) {
    const png_byte* row = rows[r];
    for (size_t i = 0; i < per_row; ++i) {
      uint16_t v;
      if (bit_depth == 16) {
        // png_set_swap made samples little-endian.
        v = static_cast<uint16_t>(row[2 * i] | (row[2 * i + 1] << 8));
      } else {
        v = row[i];
      }
      raster.samples[per_row * r + i] = v;
    }
  }
  return raster;
}

void WritePng(const std::filesystem::path& path, const PngRaster& raster) {
  int color_type;
  switch (raster.channels) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default:
      throw Error(ErrorCode::kFormatError, "unsupported channel count");
  }
  if (raster.bit_depth != 8 && raster.bit_depth != 16) {
    throw Error(ErrorCode::kFormatError, "unsupported bit depth");
  }
  const size_t per_row = static_cast<size_t>(raster.width) * raster.channels;
  if (raster.width < 1 || raster.height < 1 ||
      raster.samples.size() != per_row * raster.height) {
    throw Error(ErrorCode::kInvalidRaster, "PNG raster has wrong sample count");
  }

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    FilePtr file(std::fopen(tmp.c_str(), "wb"));
    if (!file) {
      throw Error(ErrorCode::kIoError, "cannot create " + tmp.string());
    }
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message,
                                              OnPngError, OnPngWarning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (info == nullptr) {
      png_destroy_write_struct(&png, nullptr);
      throw Error(ErrorCode::kIoError, "libpng initialisation failed");
    }
    const size_t bytes_per_sample = raster.bit_depth / 8;
    std::vector<png_byte> buffer(per_row * bytes_per_sample * raster.height);
    for (size_t i = 0; i < raster.samples.size(); ++i) {
      const uint16_t v = raster.samples[i];
      if (bytes_per_sample == 2) {
        buffer[2 * i] = static_cast<png_byte>(v >> 8);
        buffer[2 * i + 1] = static_cast<png_byte>(v & 0xff);
      } else {
        buffer[i] = static_cast<png_byte>(v);
      }
    }
    std::vector<png_bytep> rows(raster.height);
    for (int r = 0; r < raster.height; ++r) {
      rows[r] = &buffer[per_row * bytes_per_sample * r];
    }
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      file.reset();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::kIoError,
                  "cannot encode " + path.string() + ": " + message);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, raster.width, raster.height, raster.bit_depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(file.get()) != 0) {
      throw Error(ErrorCode::kIoError, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

RgbImage ReadRgbPng(const std::filesystem::path& path) {
  const PngRaster raster = ReadPng(path);
  if (raster.bit_depth != 8) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": expected an 8-bit image");
  }
  const size_t pixels = static_cast<size_t>(raster.width) * raster.height;
  std::vector<uint8_t> ch(pixels * 3);
  for (size_t p = 0; p < pixels; ++p) {
    const uint16_t* s = &raster.samples[p * raster.channels];
    for (int k = 0; k < 3; ++k) {
      ch[p * 3 + k] = static_cast<uint8_t>(raster.channels >= 3 ? s[k] : s[0]);
    }
  }
  return RgbImage(raster.width, raster.height, std::move(ch));
}

void WriteRgbPng(const std::filesystem::path& path, const RgbImage& img) {
  PngRaster raster{img.width(), img.height(), 3, 8, {}};
  raster.samples.assign(img.channels().begin(), img.channels().end());
  WritePng(path, raster);
}

void WriteSaliencyPng(const std::filesystem::path& path,
                      const SaliencyMap& saliency) {
  PngRaster raster{saliency.width(), saliency.height(), 1, 16, {}};
  raster.samples.reserve(saliency.values().size());
  for (double v : saliency.values()) {
    raster.samples.push_back(static_cast<uint16_t>(std::lround(v * 65535.0)));
  }
  WritePng(path, raster);
}

void WriteMaskPng(const std::filesystem::path& path, const BinaryMask& mask) {
  PngRaster raster{mask.width(), mask.height(), 1, 8, {}};
  raster.samples.reserve(mask.values().size());
  for (uint8_t v : mask.values()) raster.samples.push_back(v ? 255 : 0);
  WritePng(path, raster);
}

}  // namespace salieval
