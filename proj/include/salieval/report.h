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

#ifndef SALIEVAL_REPORT_H_
#define SALIEVAL_REPORT_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "salieval/metrics.h"

namespace salieval {

enum class Metric { kAuprc, kAucJudd };

std::string_view MetricName(Metric metric);

// An (image, mask source) pair that produced no record.
struct SkippedImage {
  std::string image_id;
  MaskSource source = MaskSource::kAnnotationBox;
  std::string reason;
  // False for images that simply have no usable ground truth; true for
  // unreadable or inconsistent inputs.
  bool failure = false;
};

struct SourceSummary {
  MaskSource source = MaskSource::kAnnotationBox;
  // Absent when nothing was evaluated for this source.
  std::optional<double> mean_auprc;
  std::optional<double> median_auprc;
  std::optional<double> mean_auc_judd;
  std::optional<double> median_auc_judd;
  int64_t evaluated = 0;
  int64_t skipped = 0;
  std::vector<std::string> skipped_ids;
};

struct SummaryTable {
  // One entry per source that had records or skips, in enum order.
  std::vector<SourceSummary> sources;

  const SourceSummary* Find(MaskSource source) const;
};

SummaryTable Aggregate(std::span<const EvalRecord> records,
                       std::span<const SkippedImage> skipped = {});

struct Histogram {
  Metric metric = Metric::kAuprc;
  MaskSource source = MaskSource::kAnnotationBox;
  std::vector<double> bin_edges;
  std::vector<int64_t> counts;
};

// Equal-width bins over [0,1]; bins are [lo, hi) except the last, which also
// holds 1.0.
Histogram MakeHistogram(std::span<const EvalRecord> records, Metric metric,
                        MaskSource source, int bins);

struct ComparisonTable {
  // external_mask minus annotation_box.
  std::optional<double> delta_mean_auprc;
  std::optional<double> delta_median_auprc;
  std::optional<double> delta_mean_auc_judd;
  std::optional<double> delta_median_auc_judd;
  // Over records that carry containment_in_box.
  std::optional<double> mean_containment;
  int64_t containment_records = 0;
  int64_t containment_at_one = 0;
};

// Throws kInsufficientSources unless both sources are in the summary.
ComparisonTable CompareSources(const SummaryTable& summary,
                               std::span<const EvalRecord> records);

struct ReportOptions {
  std::string version;
  nlohmann::json config = nlohmann::json::object();
  bool write_svg = false;
};

std::string FormatRecordsCsv(std::span<const EvalRecord> records);
std::string FormatHistogramCsv(const Histogram& histogram);
std::string FormatHistogramSvg(const Histogram& histogram);
nlohmann::json SummaryToJson(const SummaryTable& summary,
                             const std::optional<ComparisonTable>& comparison,
                             const ReportOptions& options);

// Writes records.csv, summary.json and histogram_<metric>_<source>.csv (plus
// .svg when requested) into out_dir. Returns the written paths.
std::vector<std::filesystem::path> EmitReport(
    const SummaryTable& summary,
    const std::optional<ComparisonTable>& comparison,
    std::span<const EvalRecord> records,
    std::span<const Histogram> histograms,
    const std::filesystem::path& out_dir, const ReportOptions& options);

}  // namespace salieval

#endif  // SALIEVAL_REPORT_H_
