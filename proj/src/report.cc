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

#include "salieval/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace salieval {
namespace {

using nlohmann::json;

constexpr MaskSource kAllSources[] = {MaskSource::kAnnotationBox,
                                      MaskSource::kExternalMask};

bool RecordLess(const EvalRecord& a, const EvalRecord& b) {
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return a.mask_source < b.mask_source;
}

std::vector<EvalRecord> Sorted(std::span<const EvalRecord> records) {
  std::vector<EvalRecord> out(records.begin(), records.end());
  std::sort(out.begin(), out.end(), RecordLess);
  return out;
}

double MetricValue(const EvalRecord& r, Metric metric) {
  return metric == Metric::kAuprc ? r.auprc : r.auc_judd;
}

double Mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> Delta(const std::optional<double>& external,
                            const std::optional<double>& box) {
  if (!external || !box) return std::nullopt;
  return *external - *box;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace

std::string_view MetricName(Metric metric) {
  return metric == Metric::kAuprc ? "auprc" : "auc_judd";
}

const SourceSummary* SummaryTable::Find(MaskSource source) const {
  for (const SourceSummary& s : sources) {
    if (s.source == source) return &s;
  }
  return nullptr;
}

SummaryTable Aggregate(std::span<const EvalRecord> records,
                       std::span<const SkippedImage> skipped) {
  // Fixed summation order keeps the reduction permutation-invariant.
  const std::vector<EvalRecord> sorted = Sorted(records);
  SummaryTable table;
  for (MaskSource source : kAllSources) {
    SourceSummary summary;
    summary.source = source;
    std::vector<double> auprc;
    std::vector<double> judd;
    for (const EvalRecord& r : sorted) {
      if (r.mask_source != source) continue;
      auprc.push_back(r.auprc);
      judd.push_back(r.auc_judd);
    }
    for (const SkippedImage& s : skipped) {
      if (s.source == source) summary.skipped_ids.push_back(s.image_id);
    }
    std::sort(summary.skipped_ids.begin(), summary.skipped_ids.end());
    summary.evaluated = static_cast<int64_t>(auprc.size());
    summary.skipped = static_cast<int64_t>(summary.skipped_ids.size());
    if (summary.evaluated == 0 && summary.skipped == 0) continue;
    if (!auprc.empty()) {
      summary.mean_auprc = Mean(auprc);
      summary.median_auprc = Median(auprc);
      summary.mean_auc_judd = Mean(judd);
      summary.median_auc_judd = Median(judd);
    }
    table.sources.push_back(std::move(summary));
  }
  return table;
}

Histogram MakeHistogram(std::span<const EvalRecord> records, Metric metric,
                        MaskSource source, int bins) {
  if (bins < 1) {
    throw Error(ErrorCode::kInvalidInput, "histogram needs at least 1 bin");
  }
  Histogram h;
  h.metric = metric;
  h.source = source;
  h.bin_edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[i] = static_cast<double>(i) / bins;
  h.counts.assign(bins, 0);
  for (const EvalRecord& r : records) {
    if (r.mask_source != source) continue;
    const double v = std::clamp(MetricValue(r, metric), 0.0, 1.0);
    int idx = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
    // v * bins can land an ulp off an edge; settle against the edges proper.
    while (idx > 0 && v < h.bin_edges[idx]) --idx;
    while (idx < bins - 1 && v >= h.bin_edges[idx + 1]) ++idx;
    ++h.counts[idx];
  }
  return h;
}

ComparisonTable CompareSources(const SummaryTable& summary,
                               std::span<const EvalRecord> records) {
  const SourceSummary* box = summary.Find(MaskSource::kAnnotationBox);
  const SourceSummary* ext = summary.Find(MaskSource::kExternalMask);
  if (box == nullptr || ext == nullptr) {
    throw Error(ErrorCode::kInsufficientSources,
                "comparison needs both annotation_box and external_mask");
  }
  ComparisonTable cmp;
  cmp.delta_mean_auprc = Delta(ext->mean_auprc, box->mean_auprc);
  cmp.delta_median_auprc = Delta(ext->median_auprc, box->median_auprc);
  cmp.delta_mean_auc_judd = Delta(ext->mean_auc_judd, box->mean_auc_judd);
  cmp.delta_median_auc_judd =
      Delta(ext->median_auc_judd, box->median_auc_judd);

  std::vector<double> containment;
  for (const EvalRecord& r : Sorted(records)) {
    if (!r.containment_in_box) continue;
    containment.push_back(*r.containment_in_box);
    if (*r.containment_in_box == 1.0) ++cmp.containment_at_one;
  }
  cmp.containment_records = static_cast<int64_t>(containment.size());
  if (!containment.empty()) cmp.mean_containment = Mean(containment);
  return cmp;
}

std::string FormatRecordsCsv(std::span<const EvalRecord> records) {
  std::string out =
      "image_id,mask_source,positives,negatives,baseline_auprc,auprc,"
      "auc_judd,containment_in_box\n";
  for (const EvalRecord& r : Sorted(records)) {
    out += r.image_id;
    out += ',';
    out += MaskSourceName(r.mask_source);
    out += ',' + std::to_string(r.positives) + ',' +
           std::to_string(r.negatives) + ',' + Fixed6(r.baseline_auprc) + ',' +
           Fixed6(r.auprc) + ',' + Fixed6(r.auc_judd) + ',';
    if (r.containment_in_box) out += Fixed6(*r.containment_in_box);
    out += '\n';
  }
  return out;
}

std::string FormatHistogramCsv(const Histogram& histogram) {
  std::string out = "bin_lower,bin_upper,count\n";
  for (size_t i = 0; i < histogram.counts.size(); ++i) {
    out += Fixed6(histogram.bin_edges[i]) + ',' +
           Fixed6(histogram.bin_edges[i + 1]) + ',' +
           std::to_string(histogram.counts[i]) + '\n';
  }
  return out;
}

std::string FormatHistogramSvg(const Histogram& histogram) {
  constexpr int kWidth = 400;
  constexpr int kHeight = 200;
  constexpr int kMargin = 20;
  const int64_t peak = std::max<int64_t>(
      1, *std::max_element(histogram.counts.begin(), histogram.counts.end()));
  const double bar = static_cast<double>(kWidth - 2 * kMargin) /
                     static_cast<double>(histogram.counts.size());
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(kWidth) + "\" height=\"" +
                    std::to_string(kHeight) + "\">\n";
  out += "<title>" + std::string(MetricName(histogram.metric)) + " / " +
         std::string(MaskSourceName(histogram.source)) + "</title>\n";
  char buf[256];
  for (size_t i = 0; i < histogram.counts.size(); ++i) {
    const double h = static_cast<double>(kHeight - 2 * kMargin) *
                     static_cast<double>(histogram.counts[i]) /
                     static_cast<double>(peak);
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                  "fill=\"steelblue\"/>\n",
                  kMargin + bar * static_cast<double>(i),
                  kHeight - kMargin - h, bar * 0.9, h);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                "stroke=\"black\"/>\n",
                kMargin, kHeight - kMargin, kWidth - kMargin,
                kHeight - kMargin);
  out += buf;
  out += "</svg>\n";
  return out;
}

json SummaryToJson(const SummaryTable& summary,
                   const std::optional<ComparisonTable>& comparison,
                   const ReportOptions& options) {
  json doc;
  doc["tool"] = "salieval";
  doc["version"] = options.version;
  doc["config"] = options.config;

  json sources = json::object();
  for (const SourceSummary& s : summary.sources) {
    sources[std::string(MaskSourceName(s.source))] = {
        {"mean_auprc", OptionalNumber(s.mean_auprc)},
        {"median_auprc", OptionalNumber(s.median_auprc)},
        {"mean_auc_judd", OptionalNumber(s.mean_auc_judd)},
        {"median_auc_judd", OptionalNumber(s.median_auc_judd)},
        {"evaluated", s.evaluated},
        {"skipped", s.skipped},
        {"skipped_ids", s.skipped_ids},
    };
  }
  doc["sources"] = sources;

  // Statistic x source grid, one row per line of the usual results table.
  json table = json::object();
  const std::pair<const char*, std::optional<double> SourceSummary::*> rows[] =
      {{"Average AUPRC", &SourceSummary::mean_auprc},
       {"Median AUPRC", &SourceSummary::median_auprc},
       {"Average AUC Judd", &SourceSummary::mean_auc_judd},
       {"Median AUC Judd", &SourceSummary::median_auc_judd}};
  for (const auto& [label, field] : rows) {
    json row = json::object();
    for (const SourceSummary& s : summary.sources) {
      row[std::string(MaskSourceName(s.source))] = OptionalNumber(s.*field);
    }
    table[label] = row;
  }
  doc["table"] = table;

  if (comparison) {
    doc["comparison"] = {
        {"delta_mean_auprc", OptionalNumber(comparison->delta_mean_auprc)},
        {"delta_median_auprc", OptionalNumber(comparison->delta_median_auprc)},
        {"delta_mean_auc_judd",
         OptionalNumber(comparison->delta_mean_auc_judd)},
        {"delta_median_auc_judd",
         OptionalNumber(comparison->delta_median_auc_judd)},
        {"mean_containment", OptionalNumber(comparison->mean_containment)},
        {"containment_records", comparison->containment_records},
        {"containment_at_one", comparison->containment_at_one},
    };
  } else {
    doc["comparison"] = nullptr;
  }
  return doc;
}

std::vector<std::filesystem::path> EmitReport(
    const SummaryTable& summary,
    const std::optional<ComparisonTable>& comparison,
    std::span<const EvalRecord> records,
    std::span<const Histogram> histograms,
    const std::filesystem::path& out_dir, const ReportOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + out_dir.string() + ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    const auto path = out_dir / name;
    WriteFile(path, text);
    written.push_back(path);
  };
  emit("records.csv", FormatRecordsCsv(records));
  emit("summary.json",
       SummaryToJson(summary, comparison, options).dump(2) + "\n");
  for (const Histogram& h : histograms) {
    const std::string stem = "histogram_" + std::string(MetricName(h.metric)) +
                             "_" + std::string(MaskSourceName(h.source));
    emit(stem + ".csv", FormatHistogramCsv(h));
    if (options.write_svg) emit(stem + ".svg", FormatHistogramSvg(h));
  }
  return written;
}

}  // namespace salieval
