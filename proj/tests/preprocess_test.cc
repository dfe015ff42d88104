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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"

namespace salieval {
namespace {

using ::salieval::testing::RandomMask;

RgbImage RandomImage(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<uint8_t> ch(static_cast<size_t>(w) * h * 3);
  for (auto& v : ch) v = static_cast<uint8_t>(byte(rng));
  return RgbImage(w, h, std::move(ch));
}

// Textbook sRGB -> Lab with the published D65 constants, written out
// independently of the library.
Lab ReferenceLab(int r8, int g8, int b8) {
  auto lin = [](int v) {
    const double c = v / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
  };
  const double r = lin(r8), g = lin(g8), b = lin(b8);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  auto f = [](double t) {
    return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0;
  };
  const double fx = f(x / 0.95047), fy = f(y / 1.0), fz = f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

TEST(RgbToLabTest, BlackAndWhite) {
  const Lab black = SrgbToLab({0, 0, 0});
  EXPECT_EQ(black.l, 0.0);
  const Lab white = SrgbToLab({255, 255, 255});
  EXPECT_NEAR(white.l, 100.0, 1e-9);
  EXPECT_LT(std::abs(white.a), 0.5);
  EXPECT_LT(std::abs(white.b), 0.5);
}

TEST(RgbToLabTest, MidGrayMatchesReferenceFormula) {
  const Lab gray = SrgbToLab({119, 119, 119});
  const Lab ref = ReferenceLab(119, 119, 119);
  EXPECT_NEAR(gray.l, ref.l, 0.01);
  EXPECT_NEAR(gray.a, 0.0, 0.01);
  EXPECT_NEAR(gray.b, 0.0, 0.01);
}

TEST(RgbToLabTest, ColoursMatchReferenceFormula) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 1000; ++i) {
    const int r = byte(rng), g = byte(rng), b = byte(rng);
    const Lab got = SrgbToLab({static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                               static_cast<uint8_t>(b)});
    const Lab ref = ReferenceLab(r, g, b);
    EXPECT_NEAR(got.l, ref.l, 0.01);
    EXPECT_NEAR(got.a, ref.a, 0.05);
    EXPECT_NEAR(got.b, ref.b, 0.05);
  }
}

TEST(LabToRgbTest, ZeroLightnessIsBlack) {
  EXPECT_EQ(LabToSrgb({0.0, 0.0, 0.0}), (Rgb{0, 0, 0}));
}

TEST(LabToRgbTest, RoundTripOverSampledCube) {
  int worst = 0;
  for (int r = 0; r < 256; r += 3) {
    for (int g = 0; g < 256; g += 5) {
      for (int b = 0; b < 256; b += 7) {
        const Rgb in{static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                     static_cast<uint8_t>(b)};
        const Rgb out = LabToSrgb(SrgbToLab(in));
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(in[k] - out[k]));
      }
    }
  }
  EXPECT_LE(worst, 1);
}

TEST(LabToRgbTest, RandomImageRoundTrip) {
  std::mt19937_64 rng(2);
  const RgbImage img = RandomImage(rng, 16, 16);
  const RgbImage back = LabToRgb(RgbToLab(img));
  for (size_t i = 0; i < img.channels().size(); ++i) {
    EXPECT_LE(std::abs(img.channels()[i] - back.channels()[i]), 1) << i;
  }
}

// Global equalization of the quantized L channel, computed directly.
std::vector<double> GlobalEqualizedL(const LabImage& lab) {
  std::vector<int> bins;
  std::array<int64_t, 256> hist{};
  for (const Lab& p : lab.pixels()) {
    const int b = static_cast<int>(std::clamp<long>(std::lround(p.l * 2.55), 0, 255));
    bins.push_back(b);
    ++hist[b];
  }
  std::array<double, 256> cdf{};
  int64_t running = 0;
  for (int b = 0; b < 256; ++b) {
    running += hist[b];
    cdf[b] = static_cast<double>(running) / static_cast<double>(bins.size());
  }
  std::vector<double> out;
  for (int b : bins) out.push_back(100.0 * cdf[b]);
  return out;
}

TEST(ClaheTest, SingleTileUnclippedMatchesGlobalEqualization) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const LabImage lab = RgbToLab(RandomImage(rng, 13 + trial, 9 + trial));
    const LabImage eq = ClaheLab(lab, {1, 1, 1e9});
    const auto expected = GlobalEqualizedL(lab);
    for (size_t i = 0; i < expected.size(); ++i) {
      EXPECT_LE(std::abs(eq.pixels()[i].l - expected[i]), 100.0 / 255.0);
    }
  }
}

TEST(ClaheTest, TwoLevelImageMapsToCdfPositions) {
  std::vector<Lab> px;
  for (int i = 0; i < 32; ++i) {
    px.push_back({(i % 2 == 0 ? 64 : 192) * 100.0 / 255.0, 0.0, 0.0});
  }
  const LabImage eq = ClaheLab(LabImage(8, 4, std::move(px)), {1, 1, 1e9});
  for (int i = 0; i < 32; ++i) {
    EXPECT_NEAR(eq.pixels()[i].l, i % 2 == 0 ? 50.0 : 100.0, 1e-9);
  }
}

TEST(ClaheTest, UniformImageIsFixedPoint) {
  for (const Rgb color : {Rgb{0, 0, 0}, Rgb{119, 119, 119}, Rgb{200, 30, 90},
                          Rgb{255, 255, 255}}) {
    const RgbImage img = RgbImage::Filled(24, 17, color);
    EXPECT_EQ(ClaheL(img, {}), img);
    EXPECT_EQ(ClaheL(img, {3, 2, 1.0}), img);
    EXPECT_EQ(ClaheL(img, {1, 1, 1e9}), img);
  }
}

TEST(ClaheTest, PreservesShapeAndChroma) {
  std::mt19937_64 rng(4);
  const LabImage lab = RgbToLab(RandomImage(rng, 37, 29));
  const LabImage eq = ClaheLab(lab, {4, 3, 2.0});
  ASSERT_EQ(eq.width(), 37);
  ASSERT_EQ(eq.height(), 29);
  for (size_t i = 0; i < lab.pixels().size(); ++i) {
    EXPECT_EQ(eq.pixels()[i].a, lab.pixels()[i].a);
    EXPECT_EQ(eq.pixels()[i].b, lab.pixels()[i].b);
    EXPECT_GE(eq.pixels()[i].l, 0.0);
    EXPECT_LE(eq.pixels()[i].l, 100.0);
  }
}

TEST(ClaheTest, ClippingLimitsContrastGain) {
  // Low-contrast ramp: heavier clipping stays closer to the input.
  std::vector<uint8_t> ch;
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      const auto v = static_cast<uint8_t>(100 + (c % 8));
      ch.insert(ch.end(), {v, v, v});
    }
  }
  const RgbImage img(32, 32, ch);
  auto spread = [](const RgbImage& im) {
    int lo = 255, hi = 0;
    for (uint8_t v : im.channels()) {
      lo = std::min<int>(lo, v);
      hi = std::max<int>(hi, v);
    }
    return hi - lo;
  };
  EXPECT_LT(spread(ClaheL(img, {2, 2, 1.5})), spread(ClaheL(img, {2, 2, 1e9})));
  EXPECT_GT(spread(ClaheL(img, {2, 2, 1e9})), spread(img));
}

TEST(ClaheTest, DeterministicAndErrors) {
  std::mt19937_64 rng(5);
  const RgbImage img = RandomImage(rng, 20, 20);
  EXPECT_EQ(ClaheL(img, {8, 8, 2.0}), ClaheL(img, {8, 8, 2.0}));
  try {
    ClaheL(RgbImage::Filled(4, 4, {1, 2, 3}), {8, 2, 2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kImageTooSmall);
  }
  EXPECT_THROW(ClaheL(img, {0, 1, 2.0}), Error);
  EXPECT_THROW(ClaheL(img, {1, 1, 0.5}), Error);
}

TEST(ColorRangeMaskTest, Examples) {
  std::mt19937_64 rng(6);
  const RgbImage img = RandomImage(rng, 5, 5);
  EXPECT_EQ(CountMask(ColorRangeMask(img, {0, 0, 0}, {255, 255, 255})).negatives,
            0);
  EXPECT_EQ(
      CountMask(ColorRangeMask(RgbImage::Filled(3, 3, {9, 20, 30}), {10, 20, 30},
                               {10, 20, 30}))
          .positives,
      0);
}

TEST(ColorRangeMaskTest, CountsMatchEnumeration) {
  std::vector<uint8_t> ch(16 * 3, 0);
  const int in_range[] = {0, 3, 6, 9, 15};
  for (int p : in_range) {
    ch[p * 3] = 120;
    ch[p * 3 + 1] = 40;
    ch[p * 3 + 2] = 200;
  }
  ch[4 * 3] = 120;  // red in range, blue not
  const BinaryMask m =
      ColorRangeMask(RgbImage(4, 4, ch), {100, 30, 180}, {140, 50, 220});
  EXPECT_EQ(CountMask(m).positives, 5);
  for (int p : in_range) EXPECT_EQ(m.values()[p], 1);
}

TEST(ColorRangeMaskTest, WideningNeverRemovesPositives) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 100; ++trial) {
    const RgbImage img = RandomImage(rng, 8, 8);
    Rgb lo, hi, wlo, whi;
    for (int k = 0; k < 3; ++k) {
      int a = byte(rng), b = byte(rng);
      if (a > b) std::swap(a, b);
      lo[k] = static_cast<uint8_t>(a);
      hi[k] = static_cast<uint8_t>(b);
      wlo[k] = static_cast<uint8_t>(std::max(0, a - byte(rng) / 4));
      whi[k] = static_cast<uint8_t>(std::min(255, b + byte(rng) / 4));
    }
    const BinaryMask narrow = ColorRangeMask(img, lo, hi);
    const BinaryMask wide = ColorRangeMask(img, wlo, whi);
    for (size_t i = 0; i < narrow.values().size(); ++i) {
      EXPECT_LE(narrow.values()[i], wide.values()[i]);
    }
  }
}

TEST(ColorRangeMaskTest, InvertedBounds) {
  try {
    ColorRangeMask(RgbImage::Filled(2, 2, {0, 0, 0}), {10, 0, 0}, {9, 255, 255});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidRange);
  }
}

BinaryMask SquareWithHole() {
  std::vector<uint8_t> v(81, 0);
  for (int r = 2; r <= 6; ++r) {
    for (int c = 2; c <= 6; ++c) v[r * 9 + c] = 1;
  }
  v[4 * 9 + 4] = 0;
  return BinaryMask(9, 9, v);
}

TEST(MorphRefineTest, UnitKernelIsIdentity) {
  std::mt19937_64 rng(8);
  const BinaryMask m = RandomMask(rng, 11, 7, 0.4);
  EXPECT_EQ(MorphRefine(m, 1, false), m);
}

TEST(MorphRefineTest, FillsEnclosedHole) {
  const BinaryMask solid = RasterizeBox({2, 2, 6, 6}, 9, 9);
  EXPECT_EQ(MorphRefine(SquareWithHole(), 1, true), solid);
  EXPECT_EQ(MorphRefine(SquareWithHole(), 3, true), solid);
}

TEST(MorphRefineTest, OpeningRemovesIsolatedPixel) {
  std::vector<uint8_t> v(49, 0);
  v[3 * 7 + 3] = 1;
  EXPECT_EQ(CountMask(MorphRefine(BinaryMask(7, 7, v), 3, false)).positives, 0);
}

TEST(MorphRefineTest, HoleFillUsesFourConnectivity) {
  // A zero pixel touching the outside only diagonally is a hole.
  const BinaryMask m(3, 3, {1, 1, 0,
                            1, 0, 1,
                            1, 1, 1});
  const BinaryMask filled = FillHoles(m);
  EXPECT_EQ(filled.at(1, 1), 1);
  EXPECT_EQ(filled.at(0, 2), 0);
}

TEST(MorphRefineTest, ErosionAndDilationBracketTheMask) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryMask m = RandomMask(rng, 12, 10, 0.5);
    const int k = 1 + 2 * (trial % 3);
    const BinaryMask e = Erode(m, k);
    const BinaryMask d = Dilate(m, k);
    for (size_t i = 0; i < m.values().size(); ++i) {
      EXPECT_LE(e.values()[i], m.values()[i]);
      EXPECT_LE(m.values()[i], d.values()[i]);
    }
  }
}

TEST(MorphRefineTest, EvenKernelRejected) {
  try {
    MorphRefine(BinaryMask::Zeros(3, 3), 2, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidKernel);
  }
  EXPECT_THROW(Erode(BinaryMask::Zeros(3, 3), 0), Error);
}

TEST(LinearContrastTest, Examples) {
  std::mt19937_64 rng(10);
  const RgbImage img = RandomImage(rng, 4, 4);
  EXPECT_EQ(LinearContrast(img, 1.0, 0.0), img);
  EXPECT_EQ(LinearContrast(RgbImage::Filled(1, 1, {200, 200, 200}), 2.0, 0.0)
                .at(0, 0),
            (Rgb{255, 255, 255}));
  EXPECT_EQ(LinearContrast(RgbImage::Filled(1, 1, {100, 100, 100}), 1.5, -20.0)
                .at(0, 0),
            (Rgb{130, 130, 130}));
  EXPECT_EQ(LinearContrast(RgbImage::Filled(1, 1, {10, 10, 10}), 1.0, -50.0)
                .at(0, 0),
            (Rgb{0, 0, 0}));
  EXPECT_THROW(LinearContrast(img, -1.0, 0.0), Error);
}

TEST(WeightedBlendTest, Examples) {
  std::mt19937_64 rng(11);
  const RgbImage a = RandomImage(rng, 4, 3);
  const RgbImage b = RandomImage(rng, 4, 3);
  EXPECT_EQ(WeightedBlend(a, b, 0.0), a);
  EXPECT_EQ(WeightedBlend(a, b, 1.0), b);
  EXPECT_EQ(WeightedBlend(RgbImage::Filled(1, 1, {100, 100, 100}),
                          RgbImage::Filled(1, 1, {200, 200, 200}), 0.5)
                .at(0, 0),
            (Rgb{150, 150, 150}));
  try {
    WeightedBlend(a, RandomImage(rng, 3, 4), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  EXPECT_THROW(WeightedBlend(a, b, 1.5), Error);
}

// 8x8 fixture: a 4x4 in-range block at rows/cols 2..5 with one out-of-range
// pixel inside it, one stray in-range pixel in the corner, dark background.
RgbImage RangeMorphFixture() {
  std::vector<uint8_t> ch(8 * 8 * 3, 20);
  auto set = [&](int r, int c, Rgb v) {
    for (int k = 0; k < 3; ++k) ch[(r * 8 + c) * 3 + k] = v[k];
  };
  for (int r = 2; r <= 5; ++r) {
    for (int c = 2; c <= 5; ++c) set(r, c, {200, 60, 70});
  }
  set(3, 3, {10, 10, 10});
  set(0, 7, {210, 50, 50});
  return RgbImage(8, 8, ch);
}

TEST(RunPreprocessTest, RangeMorphHandDerived) {
  PreprocessParams params;
  params.lower = {150, 0, 0};
  params.upper = {255, 100, 100};
  params.kernel = 3;
  params.fill_holes = true;
  params.alpha = 1.0;
  params.beta = 10.0;
  const RgbImage out =
      RunPreprocess(RangeMorphFixture(), PreprocessMethod::kRangeMorph, params);
  // Closing fills the interior hole; opening drops the corner pixel; pixels
  // outside the refined mask go to 0 and then gain the +10 bias.
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      Rgb expected{10, 10, 10};
      if (r >= 2 && r <= 5 && c >= 2 && c <= 5) expected = {210, 70, 80};
      if (r == 3 && c == 3) expected = {20, 20, 20};
      EXPECT_EQ(out.at(r, c), expected) << r << "," << c;
    }
  }
}

TEST(RunPreprocessTest, IdentityCompositions) {
  std::mt19937_64 rng(12);
  const RgbImage img = RandomImage(rng, 24, 24);
  PreprocessParams params;
  params.blend_weight = 0.0;
  EXPECT_EQ(RunPreprocess(img, PreprocessMethod::kClaheBlend, params), img);
  const RgbImage flat = RgbImage::Filled(16, 16, {90, 140, 60});
  EXPECT_EQ(RunPreprocess(flat, PreprocessMethod::kClahe, PreprocessParams{}),
            flat);
}

TEST(PreprocessMethodTest, Names) {
  for (auto m : {PreprocessMethod::kRangeMorph, PreprocessMethod::kClahe,
                 PreprocessMethod::kClaheBlend}) {
    EXPECT_EQ(ParsePreprocessMethod(PreprocessMethodName(m)), m);
  }
  EXPECT_FALSE(ParsePreprocessMethod("sharpen").has_value());
}

}  // namespace
}  // namespace salieval
