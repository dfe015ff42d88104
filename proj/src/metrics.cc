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

#include "salieval/metrics.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <utility>

namespace salieval {
namespace {

// Cumulative counts after consuming one tie block of the descending sweep.
struct TieBlock {
  int64_t true_positives = 0;
  int64_t false_positives = 0;
  bool has_positive = false;
};

void CheckShapes(const SaliencyMap& saliency, const BinaryMask& truth) {
  if (saliency.width() != truth.width() ||
      saliency.height() != truth.height()) {
    throw Error(ErrorCode::kShapeMismatch,
                "saliency is " + std::to_string(saliency.width()) + "x" +
                    std::to_string(saliency.height()) + " but mask is " +
                    std::to_string(truth.width()) + "x" +
                    std::to_string(truth.height()));
  }
}

std::vector<TieBlock> SweepTieBlocks(const SaliencyMap& saliency,
                                     const BinaryMask& truth) {
  const auto values = saliency.values();
  const auto labels = truth.values();
  std::vector<std::pair<double, uint8_t>> ranked(values.size());
  for (size_t i = 0; i < values.size(); ++i) ranked[i] = {values[i], labels[i]};
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<TieBlock> blocks;
  TieBlock running;
  size_t i = 0;
  while (i < ranked.size()) {
    const double value = ranked[i].first;
    running.has_positive = false;
    for (; i < ranked.size() && ranked[i].first == value; ++i) {
      if (ranked[i].second) {
        ++running.true_positives;
        running.has_positive = true;
      } else {
        ++running.false_positives;
      }
    }
    blocks.push_back(running);
  }
  return blocks;
}

}  // namespace

std::string_view MaskSourceName(MaskSource source) {
  switch (source) {
    case MaskSource::kAnnotationBox: return "annotation_box";
    case MaskSource::kExternalMask: return "external_mask";
  }
  return "unknown";
}

std::optional<MaskSource> ParseMaskSource(std::string_view name) {
  if (name == "annotation_box") return MaskSource::kAnnotationBox;
  if (name == "external_mask") return MaskSource::kExternalMask;
  return std::nullopt;
}

std::vector<CurvePoint> RocPointsJudd(const SaliencyMap& saliency,
                                      const BinaryMask& truth) {
  CheckShapes(saliency, truth);
  const MaskCounts counts = CountMask(truth);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw Error(ErrorCode::kDegenerateMask,
                "AUC-Judd needs at least one positive and one negative pixel");
  }
  const double p = static_cast<double>(counts.positives);
  const double n = static_cast<double>(counts.negatives);

  std::vector<CurvePoint> points{{0.0, 0.0}};
  // A block ends at a Judd threshold exactly when it holds a positive pixel.
  for (const TieBlock& block : SweepTieBlocks(saliency, truth)) {
    if (!block.has_positive) continue;
    points.push_back({static_cast<double>(block.false_positives) / n,
                      static_cast<double>(block.true_positives) / p});
  }
  points.push_back({1.0, 1.0});
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

double AucJudd(const SaliencyMap& saliency, const BinaryMask& truth) {
  const std::vector<CurvePoint> points = RocPointsJudd(saliency, truth);
  double area = 0.0;
  for (size_t i = 1; i < points.size(); ++i) {
    area += (points[i].x - points[i - 1].x) *
            (points[i].y + points[i - 1].y) * 0.5;
  }
  return std::clamp(area, 0.0, 1.0);
}

std::vector<CurvePoint> PrPoints(const SaliencyMap& saliency,
                                 const BinaryMask& truth) {
  CheckShapes(saliency, truth);
  const MaskCounts counts = CountMask(truth);
  if (counts.positives == 0) {
    throw Error(ErrorCode::kDegenerateMask,
                "precision-recall needs at least one positive pixel");
  }
  const double p = static_cast<double>(counts.positives);
  std::vector<CurvePoint> points;
  for (const TieBlock& block : SweepTieBlocks(saliency, truth)) {
    const int64_t predicted = block.true_positives + block.false_positives;
    points.push_back({static_cast<double>(block.true_positives) / p,
                      static_cast<double>(block.true_positives) /
                          static_cast<double>(predicted)});
  }
  return points;
}

double Auprc(const SaliencyMap& saliency, const BinaryMask& truth) {
  const std::vector<CurvePoint> points = PrPoints(saliency, truth);
  double area = 0.0;
  double previous_recall = 0.0;
  for (const CurvePoint& pt : points) {
    area += (pt.x - previous_recall) * pt.y;
    previous_recall = pt.x;
  }
  return std::clamp(area, 0.0, 1.0);
}

double PrevalenceBaseline(const BinaryMask& truth) {
  const MaskCounts counts = CountMask(truth);
  return static_cast<double>(counts.positives) /
         static_cast<double>(counts.positives + counts.negatives);
}

EvalRecord EvaluatePair(const std::string& image_id,
                        const SaliencyMap& saliency, const BinaryMask& truth,
                        MaskSource source, const BinaryMask* box_mask) {
  EvalRecord record;
  record.image_id = image_id;
  record.mask_source = source;
  try {
    const MaskCounts counts = CountMask(truth);
    record.positives = counts.positives;
    record.negatives = counts.negatives;
    record.baseline_auprc = PrevalenceBaseline(truth);
    record.auprc = Auprc(saliency, truth);
    record.auc_judd = AucJudd(saliency, truth);
    if (box_mask != nullptr && source == MaskSource::kExternalMask) {
      record.containment_in_box = Containment(truth, *box_mask);
    }
  } catch (const Error& e) {
    RethrowWithContext(e, "image '" + image_id + "'");
  }
  return record;
}

std::string FormatCurveCsv(std::span<const CurvePoint> points) {
  std::string out = "x,y\n";
  char line[64];
  for (const CurvePoint& pt : points) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", pt.x, pt.y);
    out += line;
  }
  return out;
}

void WriteCurveCsv(const std::filesystem::path& path,
                   std::span<const CurvePoint> points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  out << FormatCurveCsv(points);
  if (!out) {
    throw Error(ErrorCode::kIoError, "failed writing " + path.string());
  }
}

}  // namespace salieval
