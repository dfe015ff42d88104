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

#ifndef SALIEVAL_INGEST_H_
#define SALIEVAL_INGEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salieval/core.h"
#include "salieval/metrics.h"

namespace salieval {

enum class InfectionLabel { kInfected, kUninfected };

// Case-insensitive. Uninfected: red blood cell, rbc, leukocyte. Infected:
// gametocyte, ring, trophozoite, schizont. Anything else throws
// kUnknownCategory.
InfectionLabel GroupBinary(std::string_view category);

struct AnnotationRecord {
  std::string category;
  BoundingBox box;
  InfectionLabel label = InfectionLabel::kUninfected;
};

struct ImageEntry {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<AnnotationRecord> annotations;
  std::filesystem::path saliency_path;
  std::vector<std::filesystem::path> external_mask_paths;

  int64_t InfectedCount() const;
  // Images without infected cells have no ground truth to score against.
  bool Evaluable() const { return InfectedCount() > 0; }
};

// Canonical annotation document:
//   [ { "image": str, "width": int, "height": int,
//       "objects": [ { "category": str,
//                      "bounding_box": { "min_r", "min_c",
//                                        "max_r", "max_c" } } ] } ]
// Coordinates are inclusive. Throws kParseError (with entry/field context),
// kUnknownCategory or kBoxOutOfBounds.
std::vector<ImageEntry> ParseAnnotations(std::string_view json_text,
                                         std::string_view source_name = "");
std::vector<ImageEntry> LoadAnnotations(const std::filesystem::path& path);

struct ManifestRow {
  std::string image_id;
  std::filesystem::path annotation_path;
  std::filesystem::path saliency_path;
  std::vector<std::filesystem::path> mask_paths;
};

// CSV with header image_id,annotation_path,saliency_path,mask_paths; the last
// column is ';'-separated. Relative paths resolve against `base_dir`.
std::vector<ManifestRow> ParseManifest(std::string_view csv_text,
                                       const std::filesystem::path& base_dir);

// Reads the manifest, joins every row with its annotation entry and checks
// that ids are unique. Files are not touched beyond the annotation documents.
std::vector<ImageEntry> LoadManifest(const std::filesystem::path& path);

// Lists every referenced file that does not exist.
std::vector<std::filesystem::path> MissingFiles(
    const std::vector<ImageEntry>& entries);

// Ground truth for one mask source: the union of infected boxes, or the union
// of the external mask files. Throws kEmptyGroundTruth when there is nothing
// to union.
BinaryMask GroundTruthMask(const ImageEntry& entry, MaskSource source);

// Single-channel PNG, value / 65535 (16-bit) or / 255 (8-bit).
SaliencyMap LoadSaliency(const std::filesystem::path& path);
// Single-channel 8-bit PNG, nonzero -> 1.
BinaryMask LoadMask(const std::filesystem::path& path);

// Shape-checked variants used by the evaluation harness.
SaliencyMap LoadSaliency(const std::filesystem::path& path, int width,
                         int height);
BinaryMask LoadMask(const std::filesystem::path& path, int width, int height);

struct ConversionStats {
  int images = 0;
  int objects = 0;
  int dropped_objects = 0;
};

// Converts the public malaria bounding-box export
//   [ { "image": { "pathname": str, "shape": { "r", "c", ... } },
//       "objects": [ { "category": str,
//                      "bounding_box": { "minimum": { "r", "c" },
//                                        "maximum": { "r", "c" } } } ] } ]
// into the canonical document. The export's maximum corner is exclusive and
// is shifted by -1; objects whose category GroupBinary rejects are dropped
// and counted. The image id is the pathname with its leading '/' removed.
std::string ConvertMalariaExport(std::string_view json_text,
                                 ConversionStats* stats = nullptr);

}  // namespace salieval

#endif  // SALIEVAL_INGEST_H_
