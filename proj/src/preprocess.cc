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

#include "salieval/preprocess.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <utility>

namespace salieval {
namespace {

// Linear sRGB -> XYZ, D65.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

struct Matrix3 {
  double m[3][3];
};

Matrix3 Invert(const double (&a)[3][3]) {
  Matrix3 inv;
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  inv.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  inv.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  inv.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  inv.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  inv.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return inv;
}

const Matrix3& XyzToRgb() {
  static const Matrix3 inv = Invert(kRgbToXyz);
  return inv;
}

// Reference white is the image of RGB (1,1,1), so white is exactly
// achromatic.
constexpr double WhiteComponent(int row) {
  return kRgbToXyz[row][0] + kRgbToXyz[row][1] + kRgbToXyz[row][2];
}

constexpr double kDelta = 6.0 / 29.0;

double LabF(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t)
                                      : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double LabFInverse(double u) {
  return u > kDelta ? u * u * u : 3.0 * kDelta * kDelta * (u - 4.0 / 29.0);
}

double SrgbToLinear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double LinearToSrgb(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

uint8_t ClampToByte(double v) {
  return static_cast<uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
}

void CheckKernel(int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw Error(ErrorCode::kInvalidKernel,
                "kernel must be odd and >= 1, got " + std::to_string(kernel));
  }
}

int LightnessBin(double l) {
  const long bin = std::lround(l * (kLightnessBins - 1) / 100.0);
  return static_cast<int>(std::clamp<long>(bin, 0, kLightnessBins - 1));
}

// Splits [0, extent) into `tiles` spans; the last span absorbs the remainder.
struct TileAxis {
  std::vector<int> start;
  std::vector<int> end;
  // For each pixel coordinate: the two neighbouring tiles and the weight of
  // the second one.
  std::vector<int> lo;
  std::vector<int> hi;
  std::vector<double> weight;
};

TileAxis MakeTileAxis(int extent, int tiles) {
  TileAxis axis;
  const int base = extent / tiles;
  std::vector<double> center(tiles);
  for (int t = 0; t < tiles; ++t) {
    const int s = t * base;
    const int e = t == tiles - 1 ? extent : s + base;
    axis.start.push_back(s);
    axis.end.push_back(e);
    center[t] = (s + e - 1) / 2.0;
  }
  axis.lo.resize(extent);
  axis.hi.resize(extent);
  axis.weight.resize(extent);
  int t = 0;
  for (int x = 0; x < extent; ++x) {
    if (x <= center.front()) {
      axis.lo[x] = axis.hi[x] = 0;
      axis.weight[x] = 0.0;
    } else if (x >= center.back()) {
      axis.lo[x] = axis.hi[x] = tiles - 1;
      axis.weight[x] = 0.0;
    } else {
      while (center[t + 1] <= x) ++t;
      axis.lo[x] = t;
      axis.hi[x] = t + 1;
      axis.weight[x] = (x - center[t]) / (center[t + 1] - center[t]);
    }
  }
  return axis;
}

using BinShift = std::array<double, kLightnessBins>;

// Equalization map of one tile, expressed as (mapped bin - bin).
BinShift TileShift(const std::array<int64_t, kLightnessBins>& hist,
                   int64_t pixels, double clip_limit) {
  BinShift shift{};
  const auto occupied =
      std::count_if(hist.begin(), hist.end(), [](int64_t h) { return h > 0; });
  // A flat tile has no contrast to stretch; leave it as is.
  if (occupied <= 1) return shift;

  const double limit = clip_limit * static_cast<double>(pixels) / kLightnessBins;
  std::array<double, kLightnessBins> clipped;
  double excess = 0.0;
  for (int b = 0; b < kLightnessBins; ++b) {
    const double h = static_cast<double>(hist[b]);
    clipped[b] = std::min(h, limit);
    excess += h - clipped[b];
  }
  const double spread = excess / kLightnessBins;
  double cdf = 0.0;
  for (int b = 0; b < kLightnessBins; ++b) {
    cdf += clipped[b] + spread;
    const double mapped =
        (kLightnessBins - 1) * std::min(cdf / static_cast<double>(pixels), 1.0);
    shift[b] = mapped - b;
  }
  return shift;
}

}  // namespace

RgbImage::RgbImage(int width, int height, std::vector<uint8_t> channels)
    : width_(width), height_(height), channels_(std::move(channels)) {
  if (width_ < 1 || height_ < 1 ||
      channels_.size() != static_cast<size_t>(width_) * height_ * 3) {
    throw Error(ErrorCode::kInvalidRaster,
                "RGB image " + std::to_string(width_) + "x" +
                    std::to_string(height_) + " has " +
                    std::to_string(channels_.size()) + " channel values");
  }
}

RgbImage RgbImage::Filled(int width, int height, Rgb color) {
  std::vector<uint8_t> ch;
  if (width > 0 && height > 0) {
    ch.reserve(static_cast<size_t>(width) * height * 3);
    for (int i = 0; i < width * height; ++i) {
      ch.insert(ch.end(), color.begin(), color.end());
    }
  }
  return RgbImage(width, height, std::move(ch));
}

LabImage::LabImage(int width, int height, std::vector<Lab> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ < 1 || height_ < 1 ||
      pixels_.size() != static_cast<size_t>(width_) * height_) {
    throw Error(ErrorCode::kInvalidRaster, "Lab image has wrong pixel count");
  }
  for (const Lab& p : pixels_) {
    if (!(p.l >= 0.0 && p.l <= 100.0) || !std::isfinite(p.a) ||
        !std::isfinite(p.b)) {
      throw Error(ErrorCode::kInvalidRaster,
                  "Lab pixel out of range: L=" + std::to_string(p.l));
    }
  }
}

Lab SrgbToLab(Rgb rgb) {
  double lin[3];
  for (int i = 0; i < 3; ++i) lin[i] = SrgbToLinear(rgb[i] / 255.0);
  double f[3];
  for (int row = 0; row < 3; ++row) {
    const double xyz = kRgbToXyz[row][0] * lin[0] + kRgbToXyz[row][1] * lin[1] +
                       kRgbToXyz[row][2] * lin[2];
    f[row] = LabF(xyz / WhiteComponent(row));
  }
  return {std::clamp(116.0 * f[1] - 16.0, 0.0, 100.0), 500.0 * (f[0] - f[1]),
          200.0 * (f[1] - f[2])};
}

Rgb LabToSrgb(const Lab& lab) {
  const double fy = (lab.l + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  const double xyz[3] = {LabFInverse(fx) * WhiteComponent(0),
                         LabFInverse(fy) * WhiteComponent(1),
                         LabFInverse(fz) * WhiteComponent(2)};
  const Matrix3& inv = XyzToRgb();
  Rgb out;
  for (int row = 0; row < 3; ++row) {
    const double lin = inv.m[row][0] * xyz[0] + inv.m[row][1] * xyz[1] +
                       inv.m[row][2] * xyz[2];
    out[row] = ClampToByte(255.0 * LinearToSrgb(std::clamp(lin, 0.0, 1.0)));
  }
  return out;
}

LabImage RgbToLab(const RgbImage& img) {
  std::vector<Lab> px;
  px.reserve(static_cast<size_t>(img.width()) * img.height());
  const auto ch = img.channels();
  for (size_t i = 0; i < ch.size(); i += 3) {
    px.push_back(SrgbToLab({ch[i], ch[i + 1], ch[i + 2]}));
  }
  return LabImage(img.width(), img.height(), std::move(px));
}

RgbImage LabToRgb(const LabImage& img) {
  std::vector<uint8_t> ch;
  ch.reserve(img.pixels().size() * 3);
  for (const Lab& p : img.pixels()) {
    const Rgb rgb = LabToSrgb(p);
    ch.insert(ch.end(), rgb.begin(), rgb.end());
  }
  return RgbImage(img.width(), img.height(), std::move(ch));
}

LabImage ClaheLab(const LabImage& img, const ClaheParams& params) {
  if (params.tiles_x < 1 || params.tiles_y < 1) {
    throw Error(ErrorCode::kInvalidInput, "tile counts must be >= 1");
  }
  if (!(params.clip_limit >= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "clip limit must be >= 1.0");
  }
  const int width = img.width();
  const int height = img.height();
  if (width < params.tiles_x || height < params.tiles_y) {
    throw Error(ErrorCode::kImageTooSmall,
                std::to_string(width) + "x" + std::to_string(height) +
                    " image is smaller than a " +
                    std::to_string(params.tiles_x) + "x" +
                    std::to_string(params.tiles_y) + " tile grid");
  }

  const TileAxis xs = MakeTileAxis(width, params.tiles_x);
  const TileAxis ys = MakeTileAxis(height, params.tiles_y);
  const auto pixels = img.pixels();
  std::vector<int> bins(pixels.size());
  for (size_t i = 0; i < pixels.size(); ++i) bins[i] = LightnessBin(pixels[i].l);

  std::vector<BinShift> shifts(static_cast<size_t>(params.tiles_x) *
                               params.tiles_y);
  for (int ty = 0; ty < params.tiles_y; ++ty) {
    for (int tx = 0; tx < params.tiles_x; ++tx) {
      std::array<int64_t, kLightnessBins> hist{};
      for (int r = ys.start[ty]; r < ys.end[ty]; ++r) {
        for (int c = xs.start[tx]; c < xs.end[tx]; ++c) {
          ++hist[bins[static_cast<size_t>(r) * width + c]];
        }
      }
      const int64_t count = int64_t{ys.end[ty] - ys.start[ty]} *
                            (xs.end[tx] - xs.start[tx]);
      shifts[static_cast<size_t>(ty) * params.tiles_x + tx] =
          TileShift(hist, count, params.clip_limit);
    }
  }

  constexpr double kBinWidth = 100.0 / (kLightnessBins - 1);
  std::vector<Lab> out(pixels.begin(), pixels.end());
  for (int r = 0; r < height; ++r) {
    const double wy = ys.weight[r];
    const BinShift* top = &shifts[static_cast<size_t>(ys.lo[r]) * params.tiles_x];
    const BinShift* bottom =
        &shifts[static_cast<size_t>(ys.hi[r]) * params.tiles_x];
    for (int c = 0; c < width; ++c) {
      const size_t i = static_cast<size_t>(r) * width + c;
      const int b = bins[i];
      const double wx = xs.weight[c];
      const double upper =
          (1.0 - wx) * top[xs.lo[c]][b] + wx * top[xs.hi[c]][b];
      const double lower =
          (1.0 - wx) * bottom[xs.lo[c]][b] + wx * bottom[xs.hi[c]][b];
      const double shift = (1.0 - wy) * upper + wy * lower;
      // The shift is applied to the continuous L so sub-bin detail survives.
      out[i].l = std::clamp(pixels[i].l + shift * kBinWidth, 0.0, 100.0);
    }
  }
  return LabImage(width, height, std::move(out));
}

RgbImage ClaheL(const RgbImage& img, const ClaheParams& params) {
  return LabToRgb(ClaheLab(RgbToLab(img), params));
}

BinaryMask ColorRangeMask(const RgbImage& img, Rgb lower, Rgb upper) {
  for (int k = 0; k < 3; ++k) {
    if (lower[k] > upper[k]) {
      throw Error(ErrorCode::kInvalidRange,
                  "lower bound exceeds upper bound on channel " +
                      std::to_string(k));
    }
  }
  const auto ch = img.channels();
  std::vector<uint8_t> values(ch.size() / 3);
  for (size_t p = 0; p < values.size(); ++p) {
    bool inside = true;
    for (int k = 0; k < 3; ++k) {
      const uint8_t v = ch[p * 3 + k];
      inside = inside && v >= lower[k] && v <= upper[k];
    }
    values[p] = inside ? 1 : 0;
  }
  return BinaryMask(img.width(), img.height(), std::move(values));
}

namespace {

// One separable pass of a max (dilate) or min (erode) filter of odd length
// along rows or columns. For erosion any out-of-image sample is 0.
std::vector<uint8_t> FilterPass(std::span<const uint8_t> in, int width,
                                int height, int kernel, bool along_rows,
                                bool dilate) {
  const int radius = kernel / 2;
  std::vector<uint8_t> out(in.size());
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int pos = along_rows ? c : r;
      const int extent = along_rows ? width : height;
      const int lo = pos - radius;
      const int hi = pos + radius;
      uint8_t acc;
      if (dilate) {
        acc = 0;
        for (int k = std::max(lo, 0); k <= std::min(hi, extent - 1) && !acc; ++k) {
          acc = along_rows ? in[static_cast<size_t>(r) * width + k]
                           : in[static_cast<size_t>(k) * width + c];
        }
      } else if (lo < 0 || hi >= extent) {
        acc = 0;
      } else {
        acc = 1;
        for (int k = lo; k <= hi && acc; ++k) {
          acc = along_rows ? in[static_cast<size_t>(r) * width + k]
                           : in[static_cast<size_t>(k) * width + c];
        }
      }
      out[static_cast<size_t>(r) * width + c] = acc;
    }
  }
  return out;
}

BinaryMask Morph(const BinaryMask& mask, int kernel, bool dilate) {
  CheckKernel(kernel);
  if (kernel == 1) return mask;
  const auto rows = FilterPass(mask.values(), mask.width(), mask.height(),
                               kernel, true, dilate);
  auto both = FilterPass(rows, mask.width(), mask.height(), kernel, false,
                         dilate);
  return BinaryMask(mask.width(), mask.height(), std::move(both));
}

}  // namespace

BinaryMask Dilate(const BinaryMask& mask, int kernel) {
  return Morph(mask, kernel, true);
}

BinaryMask Erode(const BinaryMask& mask, int kernel) {
  return Morph(mask, kernel, false);
}

BinaryMask FillHoles(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  const auto in = mask.values();
  std::vector<uint8_t> reached(in.size(), 0);
  std::deque<std::pair<int, int>> queue;
  auto visit = [&](int r, int c) {
    const size_t i = static_cast<size_t>(r) * w + c;
    if (in[i] == 0 && !reached[i]) {
      reached[i] = 1;
      queue.emplace_back(r, c);
    }
  };
  for (int c = 0; c < w; ++c) {
    visit(0, c);
    visit(h - 1, c);
  }
  for (int r = 0; r < h; ++r) {
    visit(r, 0);
    visit(r, w - 1);
  }
  while (!queue.empty()) {
    const auto [r, c] = queue.front();
    queue.pop_front();
    if (r > 0) visit(r - 1, c);
    if (r + 1 < h) visit(r + 1, c);
    if (c > 0) visit(r, c - 1);
    if (c + 1 < w) visit(r, c + 1);
  }
  std::vector<uint8_t> out(in.size());
  for (size_t i = 0; i < in.size(); ++i) out[i] = reached[i] ? 0 : 1;
  return BinaryMask(w, h, std::move(out));
}

BinaryMask MorphRefine(const BinaryMask& mask, int kernel, bool fill_holes) {
  CheckKernel(kernel);
  const BinaryMask closed = Erode(Dilate(mask, kernel), kernel);
  BinaryMask opened = Dilate(Erode(closed, kernel), kernel);
  return fill_holes ? FillHoles(opened) : opened;
}

RgbImage ApplyMask(const RgbImage& img, const BinaryMask& mask) {
  if (img.width() != mask.width() || img.height() != mask.height()) {
    throw Error(ErrorCode::kShapeMismatch, "mask does not match image shape");
  }
  std::vector<uint8_t> ch(img.channels().begin(), img.channels().end());
  const auto m = mask.values();
  for (size_t p = 0; p < m.size(); ++p) {
    if (!m[p]) ch[p * 3] = ch[p * 3 + 1] = ch[p * 3 + 2] = 0;
  }
  return RgbImage(img.width(), img.height(), std::move(ch));
}

RgbImage LinearContrast(const RgbImage& img, double alpha, double beta) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kInvalidInput,
                "contrast gain must be finite and >= 0");
  }
  std::vector<uint8_t> ch;
  ch.reserve(img.channels().size());
  for (uint8_t v : img.channels()) ch.push_back(ClampToByte(alpha * v + beta));
  return RgbImage(img.width(), img.height(), std::move(ch));
}

RgbImage WeightedBlend(const RgbImage& original, const RgbImage& enhanced,
                       double weight) {
  if (!original.SameShape(enhanced)) {
    throw Error(ErrorCode::kShapeMismatch, "blend inputs differ in shape");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "blend weight must be in [0,1]");
  }
  const auto a = original.channels();
  const auto b = enhanced.channels();
  std::vector<uint8_t> ch(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    ch[i] = ClampToByte(weight * b[i] + (1.0 - weight) * a[i]);
  }
  return RgbImage(original.width(), original.height(), std::move(ch));
}

std::string_view PreprocessMethodName(PreprocessMethod method) {
  switch (method) {
    case PreprocessMethod::kRangeMorph: return "range_morph";
    case PreprocessMethod::kClahe: return "clahe";
    case PreprocessMethod::kClaheBlend: return "clahe_blend";
  }
  return "unknown";
}

std::optional<PreprocessMethod> ParsePreprocessMethod(std::string_view name) {
  if (name == "range_morph") return PreprocessMethod::kRangeMorph;
  if (name == "clahe") return PreprocessMethod::kClahe;
  if (name == "clahe_blend") return PreprocessMethod::kClaheBlend;
  return std::nullopt;
}

RgbImage RunPreprocess(const RgbImage& img, PreprocessMethod method,
                       const PreprocessParams& params) {
  switch (method) {
    case PreprocessMethod::kRangeMorph: {
      const BinaryMask mask = MorphRefine(
          ColorRangeMask(img, params.lower, params.upper), params.kernel,
          params.fill_holes);
      return LinearContrast(ApplyMask(img, mask), params.alpha, params.beta);
    }
    case PreprocessMethod::kClahe:
      return ClaheL(img, params.clahe);
    case PreprocessMethod::kClaheBlend: {
      const RgbImage equalized = ClaheL(img, params.clahe);
      return LinearContrast(WeightedBlend(img, equalized, params.blend_weight),
                            params.alpha, params.beta);
    }
  }
  throw Error(ErrorCode::kInvalidInput, "unknown preprocess method");
}

}  // namespace salieval
