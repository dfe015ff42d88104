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

#include "salieval/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <functional>
#include <thread>

#include "salieval/png_io.h"

namespace salieval {
namespace {

int ResolveWorkers(int requested, size_t jobs) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  return static_cast<int>(std::min<size_t>(n, std::max<size_t>(jobs, 1)));
}

// Runs fn(i) for i in [0, jobs) on a bounded pool. Each index is visited once;
// callers write results into slot i, so output order never depends on
// scheduling.
void ParallelFor(size_t jobs, int workers,
                 const std::function<void(size_t)>& fn) {
  const int n = ResolveWorkers(workers, jobs);
  if (n == 1) {
    for (size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (int t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < jobs; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct ImageResult {
  std::vector<EvalRecord> records;
  std::vector<SkippedImage> skipped;
  // Curves for dump_curves, parallel to records.
  std::vector<std::pair<std::vector<CurvePoint>, std::vector<CurvePoint>>>
      curves;
};

bool IsDataGap(ErrorCode code) {
  return code == ErrorCode::kEmptyGroundTruth ||
         code == ErrorCode::kDegenerateMask;
}

ImageResult EvaluateEntry(const ImageEntry& entry, const RunConfig& config) {
  ImageResult result;
  auto skip_all = [&](const std::string& reason, bool failure) {
    for (MaskSource s : config.sources) {
      result.skipped.push_back({entry.image_id, s, reason, failure});
    }
  };
  if (!entry.Evaluable()) {
    skip_all("no infected annotations", false);
    return result;
  }
  std::optional<SaliencyMap> saliency;
  try {
    saliency.emplace(
        LoadSaliency(entry.saliency_path, entry.width, entry.height));
  } catch (const Error& e) {
    skip_all(std::string(ErrorCodeName(e.code())) + ": " + e.what(), true);
    return result;
  }
  for (MaskSource source : config.sources) {
    try {
      const BinaryMask truth = GroundTruthMask(entry, source);
      std::optional<BinaryMask> box_mask;
      if (source == MaskSource::kExternalMask) {
        box_mask.emplace(GroundTruthMask(entry, MaskSource::kAnnotationBox));
      }
      result.records.push_back(EvaluatePair(entry.image_id, *saliency, truth,
                                            source,
                                            box_mask ? &*box_mask : nullptr));
      if (config.dump_curves) {
        result.curves.emplace_back(RocPointsJudd(*saliency, truth),
                                   PrPoints(*saliency, truth));
      }
    } catch (const Error& e) {
      result.skipped.push_back(
          {entry.image_id, source,
           std::string(ErrorCodeName(e.code())) + ": " + e.what(),
           !IsDataGap(e.code())});
    }
  }
  return result;
}

void ValidateConfig(const RunConfig& config) {
  if (config.manifest.empty()) {
    throw Error(ErrorCode::kInvalidInput, "no manifest given");
  }
  if (!std::filesystem::is_regular_file(config.manifest)) {
    throw Error(ErrorCode::kIoError,
                "manifest not found: " + config.manifest.string());
  }
  if (config.out_dir.empty()) {
    throw Error(ErrorCode::kInvalidInput, "no output directory given");
  }
  if (std::filesystem::exists(config.out_dir) &&
      !std::filesystem::is_directory(config.out_dir)) {
    throw Error(ErrorCode::kIoError,
                config.out_dir.string() + " exists and is not a directory");
  }
  if (config.bins < 1) {
    throw Error(ErrorCode::kInvalidInput, "bins must be >= 1");
  }
  if (config.sources.empty()) {
    throw Error(ErrorCode::kInvalidInput, "no mask sources requested");
  }
}

}  // namespace

nlohmann::json ConfigEcho(const RunConfig& config) {
  nlohmann::json sources = nlohmann::json::array();
  for (MaskSource s : config.sources) sources.push_back(MaskSourceName(s));
  return {{"manifest", config.manifest.string()},
          {"sources", sources},
          {"bins", config.bins},
          {"write_svg", config.write_svg},
          {"dump_curves", config.dump_curves}};
}

EvalOutcome RunEval(const RunConfig& config, std::ostream* log) {
  ValidateConfig(config);
  const std::vector<ImageEntry> entries = LoadManifest(config.manifest);
  const auto missing = MissingFiles(entries);
  if (!missing.empty()) {
    std::string list;
    for (const auto& p : missing) list += "\n  " + p.string();
    throw Error(ErrorCode::kIoError,
                std::to_string(missing.size()) + " referenced file(s) missing:" +
                    list);
  }

  std::vector<ImageResult> results(entries.size());
  ParallelFor(entries.size(), config.workers, [&](size_t i) {
    results[i] = EvaluateEntry(entries[i], config);
  });

  EvalOutcome outcome;
  std::vector<std::pair<EvalRecord, std::pair<std::vector<CurvePoint>,
                                              std::vector<CurvePoint>>>>
      curves;
  for (ImageResult& r : results) {
    for (size_t k = 0; k < r.records.size(); ++k) {
      if (config.dump_curves) curves.emplace_back(r.records[k], r.curves[k]);
      outcome.records.push_back(std::move(r.records[k]));
    }
    for (SkippedImage& s : r.skipped) {
      if (s.failure) ++outcome.failures;
      if (log != nullptr) {
        *log << (s.failure ? "error" : "skip") << ": " << s.image_id << " ["
             << MaskSourceName(s.source) << "] " << s.reason << "\n";
      }
      outcome.skipped.push_back(std::move(s));
    }
  }
  std::sort(outcome.records.begin(), outcome.records.end(),
            [](const EvalRecord& a, const EvalRecord& b) {
              if (a.image_id != b.image_id) return a.image_id < b.image_id;
              return a.mask_source < b.mask_source;
            });

  outcome.summary = Aggregate(outcome.records, outcome.skipped);
  for (MaskSource source : config.sources) {
    for (Metric metric : {Metric::kAuprc, Metric::kAucJudd}) {
      outcome.histograms.push_back(
          MakeHistogram(outcome.records, metric, source, config.bins));
    }
  }
  if (outcome.summary.Find(MaskSource::kAnnotationBox) != nullptr &&
      outcome.summary.Find(MaskSource::kExternalMask) != nullptr) {
    outcome.comparison = CompareSources(outcome.summary, outcome.records);
  }

  ReportOptions options;
  options.version = std::string(kVersion);
  options.config = ConfigEcho(config);
  options.write_svg = config.write_svg;
  EmitReport(outcome.summary, outcome.comparison, outcome.records,
             outcome.histograms, config.out_dir, options);

  if (config.dump_curves) {
    const auto dir = config.out_dir / "curves";
    std::filesystem::create_directories(dir);
    for (const auto& [record, pts] : curves) {
      std::string stem = MaskFileName(record.image_id);
      stem.resize(stem.size() - 4);  // drop ".png"
      stem += "_" + std::string(MaskSourceName(record.mask_source));
      WriteCurveCsv(dir / (stem + "_roc.csv"), pts.first);
      WriteCurveCsv(dir / (stem + "_pr.csv"), pts.second);
    }
  }
  return outcome;
}

std::string MaskFileName(std::string_view image_id) {
  std::string stem(image_id);
  const auto dot = stem.find_last_of('.');
  const auto slash = stem.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    stem.resize(dot);
  }
  for (char& ch : stem) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ||
                    ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  if (stem.empty()) stem = "_";
  return stem + ".png";
}

RasterizeOutcome RasterizeAnnotations(const std::filesystem::path& annotations,
                                      const std::filesystem::path& out_dir) {
  const std::vector<ImageEntry> entries = LoadAnnotations(annotations);
  std::filesystem::create_directories(out_dir);
  RasterizeOutcome outcome;
  for (const ImageEntry& entry : entries) {
    if (!entry.Evaluable()) {
      outcome.skipped_ids.push_back(entry.image_id);
      continue;
    }
    const auto path = out_dir / MaskFileName(entry.image_id);
    WriteMaskPng(path, GroundTruthMask(entry, MaskSource::kAnnotationBox));
    outcome.written.push_back(path);
  }
  return outcome;
}

PreprocessOutcome PreprocessDirectory(const std::filesystem::path& in_dir,
                                      const std::filesystem::path& out_dir,
                                      PreprocessMethod method,
                                      const PreprocessParams& params,
                                      int workers, std::ostream* log) {
  if (!std::filesystem::is_directory(in_dir)) {
    throw Error(ErrorCode::kIoError,
                "input directory not found: " + in_dir.string());
  }
  std::vector<std::filesystem::path> inputs;
  for (const auto& item : std::filesystem::directory_iterator(in_dir)) {
    if (item.is_regular_file() && item.path().extension() == ".png") {
      inputs.push_back(item.path());
    }
  }
  std::sort(inputs.begin(), inputs.end());
  std::filesystem::create_directories(out_dir);

  std::vector<std::optional<std::string>> errors(inputs.size());
  ParallelFor(inputs.size(), workers, [&](size_t i) {
    try {
      WriteRgbPng(out_dir / inputs[i].filename(),
                  RunPreprocess(ReadRgbPng(inputs[i]), method, params));
    } catch (const Error& e) {
      errors[i] = std::string(ErrorCodeName(e.code())) + ": " + e.what();
    }
  });

  PreprocessOutcome outcome;
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (errors[i]) {
      if (log != nullptr) *log << "error: " << inputs[i].string() << " "
                               << *errors[i] << "\n";
      outcome.failures.emplace_back(inputs[i], *errors[i]);
    } else {
      outcome.written.push_back(out_dir / inputs[i].filename());
    }
  }
  return outcome;
}

}  // namespace salieval
