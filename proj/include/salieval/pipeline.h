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

#ifndef SALIEVAL_PIPELINE_H_
#define SALIEVAL_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "salieval/ingest.h"
#include "salieval/metrics.h"
#include "salieval/preprocess.h"
#include "salieval/report.h"

namespace salieval {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunConfig {
  std::filesystem::path manifest;
  std::vector<MaskSource> sources = {MaskSource::kAnnotationBox,
                                     MaskSource::kExternalMask};
  int bins = 20;
  std::filesystem::path out_dir;
  // 0 selects std::thread::hardware_concurrency().
  int workers = 0;
  bool write_svg = false;
  // Writes curves/<image>_<source>_{roc,pr}.csv next to the report.
  bool dump_curves = false;
};

struct EvalOutcome {
  std::vector<EvalRecord> records;
  std::vector<SkippedImage> skipped;
  SummaryTable summary;
  std::optional<ComparisonTable> comparison;
  std::vector<Histogram> histograms;
  int64_t failures = 0;
};

// Everything in the config that can change report bytes. Worker count and
// output directory are left out on purpose so reruns compare equal.
nlohmann::json ConfigEcho(const RunConfig& config);

// Validates the config and every referenced file, scores each evaluable
// image against each requested mask source, and writes the report. Config
// and pre-flight problems throw; per-image problems become SkippedImage
// entries and are logged to `log` when given.
EvalOutcome RunEval(const RunConfig& config, std::ostream* log = nullptr);

// File-system safe name derived from an image id, with a .png extension.
std::string MaskFileName(std::string_view image_id);

struct RasterizeOutcome {
  std::vector<std::filesystem::path> written;
  // Images without infected boxes; no file is written for them.
  std::vector<std::string> skipped_ids;
};

// One union mask PNG per image, built from the infected boxes.
RasterizeOutcome RasterizeAnnotations(const std::filesystem::path& annotations,
                                      const std::filesystem::path& out_dir);

struct PreprocessOutcome {
  std::vector<std::filesystem::path> written;
  std::vector<std::pair<std::filesystem::path, std::string>> failures;
};

// Runs one preprocessing method over every *.png in in_dir (sorted by name)
// and writes same-named outputs to out_dir.
PreprocessOutcome PreprocessDirectory(const std::filesystem::path& in_dir,
                                      const std::filesystem::path& out_dir,
                                      PreprocessMethod method,
                                      const PreprocessParams& params,
                                      int workers = 0,
                                      std::ostream* log = nullptr);

}  // namespace salieval

#endif  // SALIEVAL_PIPELINE_H_
