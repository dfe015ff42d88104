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

#ifndef SALIEVAL_METRICS_H_
#define SALIEVAL_METRICS_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salieval/core.h"

namespace salieval {

// A point on an ROC (x = FPR, y = TPR) or PR (x = recall, y = precision)
// curve.
struct CurvePoint {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

enum class MaskSource { kAnnotationBox, kExternalMask };

std::string_view MaskSourceName(MaskSource source);
std::optional<MaskSource> ParseMaskSource(std::string_view name);

// Per-image, per-mask-source metric bundle.
struct EvalRecord {
  std::string image_id;
  MaskSource mask_source = MaskSource::kAnnotationBox;
  int64_t positives = 0;
  int64_t negatives = 0;
  double baseline_auprc = 0.0;
  double auprc = 0.0;
  double auc_judd = 0.0;
  std::optional<double> containment_in_box;
};

// ROC points of the Judd variant. Thresholds are the distinct saliency values
// found at ground-truth positive pixels, swept from high to low; a pixel is
// predicted positive when its saliency is >= the threshold. The list starts
// at (0,0), ends at (1,1) and is nondecreasing in both coordinates.
//
// Throws kShapeMismatch, or kDegenerateMask when the truth mask is all
// positive or all negative.
std::vector<CurvePoint> RocPointsJudd(const SaliencyMap& saliency,
                                      const BinaryMask& truth);

// Trapezoidal area under RocPointsJudd.
double AucJudd(const SaliencyMap& saliency, const BinaryMask& truth);

// Precision-recall points. Pixels are ranked by saliency, high first, and
// pixels sharing a value are consumed as one block; one point is emitted per
// block. Throws kDegenerateMask when the truth mask has no positives.
std::vector<CurvePoint> PrPoints(const SaliencyMap& saliency,
                                 const BinaryMask& truth);

// Step-interpolated PR area: sum over blocks of delta-recall * precision.
double Auprc(const SaliencyMap& saliency, const BinaryMask& truth);

// P / (P + N), the AUPRC of an uninformative map.
double PrevalenceBaseline(const BinaryMask& truth);

// Scores one saliency map against one ground truth. When `box_mask` is given
// and the source is kExternalMask, the record also carries the fraction of
// the truth mask that lies inside the box mask. Errors keep their code and
// gain the image id as message context.
EvalRecord EvaluatePair(const std::string& image_id,
                        const SaliencyMap& saliency, const BinaryMask& truth,
                        MaskSource source,
                        const BinaryMask* box_mask = nullptr);

// "x,y" header then one point per line, 17 significant digits.
std::string FormatCurveCsv(std::span<const CurvePoint> points);
void WriteCurveCsv(const std::filesystem::path& path,
                   std::span<const CurvePoint> points);

}  // namespace salieval

#endif  // SALIEVAL_METRICS_H_
