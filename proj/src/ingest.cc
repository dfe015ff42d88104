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

#include "salieval/ingest.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "salieval/png_io.h"

namespace salieval {
namespace {

using nlohmann::json;

std::string Lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string Trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void FieldError(std::string_view where, std::string_view field,
                             std::string_view problem) {
  throw Error(ErrorCode::kParseError, std::string(where) + ": field '" +
                                          std::string(field) + "' " +
                                          std::string(problem));
}

const json& Field(const json& obj, std::string_view where,
                  std::string_view field) {
  if (!obj.is_object()) FieldError(where, field, "has no enclosing object");
  const auto it = obj.find(std::string(field));
  if (it == obj.end()) FieldError(where, field, "is missing");
  return *it;
}

int IntField(const json& obj, std::string_view where, std::string_view field) {
  const json& v = Field(obj, where, field);
  if (!v.is_number_integer()) FieldError(where, field, "must be an integer");
  const auto n = v.get<int64_t>();
  if (n < std::numeric_limits<int>::min() ||
      n > std::numeric_limits<int>::max()) {
    FieldError(where, field, "is out of range");
  }
  return static_cast<int>(n);
}

std::string StringField(const json& obj, std::string_view where,
                        std::string_view field) {
  const json& v = Field(obj, where, field);
  if (!v.is_string()) FieldError(where, field, "must be a string");
  return v.get<std::string>();
}

json ParseJson(std::string_view text, std::string_view source_name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                std::string(source_name.empty() ? "annotations" : source_name) +
                    ": " + e.what());
  }
}

// Splits one CSV line; double-quoted fields may contain commas and "".
std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  return fields;
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& text) {
  std::filesystem::path p(text);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void CheckShape(const std::filesystem::path& path, int got_w, int got_h,
                int want_w, int want_h) {
  if (got_w != want_w || got_h != want_h) {
    throw Error(ErrorCode::kShapeMismatch,
                path.string() + " is " + std::to_string(got_w) + "x" +
                    std::to_string(got_h) + ", manifest says " +
                    std::to_string(want_w) + "x" + std::to_string(want_h));
  }
}

}  // namespace

InfectionLabel GroupBinary(std::string_view category) {
  static const std::map<std::string, InfectionLabel, std::less<>> kGroups = {
      {"red blood cell", InfectionLabel::kUninfected},
      {"rbc", InfectionLabel::kUninfected},
      {"leukocyte", InfectionLabel::kUninfected},
      {"gametocyte", InfectionLabel::kInfected},
      {"ring", InfectionLabel::kInfected},
      {"trophozoite", InfectionLabel::kInfected},
      {"schizont", InfectionLabel::kInfected},
  };
  const auto it = kGroups.find(Lower(Trim(category)));
  if (it == kGroups.end()) {
    throw Error(ErrorCode::kUnknownCategory,
                "unknown cell category '" + std::string(category) + "'");
  }
  return it->second;
}

int64_t ImageEntry::InfectedCount() const {
  return std::count_if(annotations.begin(), annotations.end(),
                       [](const AnnotationRecord& a) {
                         return a.label == InfectionLabel::kInfected;
                       });
}

std::vector<ImageEntry> ParseAnnotations(std::string_view json_text,
                                         std::string_view source_name) {
  const json doc = ParseJson(json_text, source_name);
  const std::string prefix =
      source_name.empty() ? std::string() : std::string(source_name) + ": ";
  if (!doc.is_array()) {
    throw Error(ErrorCode::kParseError,
                prefix + "top level must be a list of images");
  }
  std::vector<ImageEntry> entries;
  entries.reserve(doc.size());
  for (size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    const std::string where = prefix + "image[" + std::to_string(i) + "]";
    ImageEntry entry;
    entry.image_id = StringField(item, where, "image");
    entry.width = IntField(item, where, "width");
    entry.height = IntField(item, where, "height");
    if (entry.width < 1 || entry.height < 1) {
      FieldError(where, "width/height", "must be >= 1");
    }
    const json& objects = Field(item, where, "objects");
    if (!objects.is_array()) FieldError(where, "objects", "must be a list");
    for (size_t k = 0; k < objects.size(); ++k) {
      const std::string owhere = where + ".objects[" + std::to_string(k) + "]";
      AnnotationRecord record;
      record.category = StringField(objects[k], owhere, "category");
      if (Trim(record.category).empty()) {
        FieldError(owhere, "category", "must not be empty");
      }
      const json& bb = Field(objects[k], owhere, "bounding_box");
      const std::string bwhere = owhere + ".bounding_box";
      record.box = {IntField(bb, bwhere, "min_r"), IntField(bb, bwhere, "min_c"),
                    IntField(bb, bwhere, "max_r"),
                    IntField(bb, bwhere, "max_c")};
      try {
        record.label = GroupBinary(record.category);
        RasterizeBox(record.box, entry.width, entry.height);
      } catch (const BoxOutOfBoundsError& e) {
        throw BoxOutOfBoundsError(e.box(), entry.width, entry.height);
      } catch (const Error& e) {
        RethrowWithContext(e, owhere);
      }
      entry.annotations.push_back(std::move(record));
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<ImageEntry> LoadAnnotations(const std::filesystem::path& path) {
  return ParseAnnotations(ReadText(path), path.string());
}

std::vector<ManifestRow> ParseManifest(std::string_view csv_text,
                                       const std::filesystem::path& base_dir) {
  std::vector<ManifestRow> rows;
  std::istringstream in{std::string(csv_text)};
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const auto fields = SplitCsvLine(line);
    const std::string where = "manifest line " + std::to_string(line_no);
    if (!header_seen) {
      const std::vector<std::string> expected = {
          "image_id", "annotation_path", "saliency_path", "mask_paths"};
      std::vector<std::string> got;
      for (const auto& f : fields) got.push_back(Trim(f));
      if (got != expected) {
        throw Error(ErrorCode::kParseError,
                    where + ": expected header "
                            "image_id,annotation_path,saliency_path,mask_paths");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) {
      throw Error(ErrorCode::kParseError,
                  where + ": expected 4 fields, got " +
                      std::to_string(fields.size()));
    }
    ManifestRow row;
    row.image_id = Trim(fields[0]);
    if (row.image_id.empty()) {
      throw Error(ErrorCode::kParseError, where + ": empty image_id");
    }
    row.annotation_path = Resolve(base_dir, Trim(fields[1]));
    row.saliency_path = Resolve(base_dir, Trim(fields[2]));
    std::string_view masks = fields[3];
    size_t start = 0;
    while (start <= masks.size()) {
      const size_t end = std::min(masks.find(';', start), masks.size());
      const std::string item = Trim(masks.substr(start, end - start));
      if (!item.empty()) row.mask_paths.push_back(Resolve(base_dir, item));
      start = end + 1;
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) {
    throw Error(ErrorCode::kParseError, "manifest is empty");
  }
  return rows;
}

std::vector<ImageEntry> LoadManifest(const std::filesystem::path& path) {
  const std::vector<ManifestRow> rows =
      ParseManifest(ReadText(path), path.parent_path());
  std::map<std::filesystem::path, std::map<std::string, ImageEntry>> documents;
  std::set<std::string> seen;
  std::vector<ImageEntry> entries;
  entries.reserve(rows.size());
  for (const ManifestRow& row : rows) {
    if (!seen.insert(row.image_id).second) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": duplicate image_id '" + row.image_id + "'");
    }
    auto doc = documents.find(row.annotation_path);
    if (doc == documents.end()) {
      std::map<std::string, ImageEntry> by_id;
      for (auto& e : LoadAnnotations(row.annotation_path)) {
        by_id.emplace(e.image_id, std::move(e));
      }
      doc = documents.emplace(row.annotation_path, std::move(by_id)).first;
    }
    const auto found = doc->second.find(row.image_id);
    if (found == doc->second.end()) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": image '" + row.image_id +
                      "' not found in " + row.annotation_path.string());
    }
    ImageEntry entry = found->second;
    entry.saliency_path = row.saliency_path;
    entry.external_mask_paths = row.mask_paths;
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<std::filesystem::path> MissingFiles(
    const std::vector<ImageEntry>& entries) {
  std::vector<std::filesystem::path> missing;
  for (const ImageEntry& e : entries) {
    if (!std::filesystem::exists(e.saliency_path)) {
      missing.push_back(e.saliency_path);
    }
    for (const auto& m : e.external_mask_paths) {
      if (!std::filesystem::exists(m)) missing.push_back(m);
    }
  }
  return missing;
}

BinaryMask GroundTruthMask(const ImageEntry& entry, MaskSource source) {
  std::vector<BinaryMask> parts;
  if (source == MaskSource::kAnnotationBox) {
    for (const AnnotationRecord& a : entry.annotations) {
      if (a.label == InfectionLabel::kInfected) {
        parts.push_back(RasterizeBox(a.box, entry.width, entry.height));
      }
    }
  } else {
    for (const auto& p : entry.external_mask_paths) {
      parts.push_back(LoadMask(p, entry.width, entry.height));
    }
  }
  if (parts.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth,
                "image '" + entry.image_id + "' has no " +
                    std::string(MaskSourceName(source)) + " ground truth");
  }
  return UnionMasks(parts);
}

SaliencyMap LoadSaliency(const std::filesystem::path& path) {
  const PngRaster raster = ReadPng(path);
  if (raster.channels != 1) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": saliency must be single-channel, found " +
                    std::to_string(raster.channels) + " channels");
  }
  const double scale = raster.bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<double> values;
  values.reserve(raster.samples.size());
  for (uint16_t v : raster.samples) values.push_back(v / scale);
  return SaliencyMap(raster.width, raster.height, std::move(values));
}

BinaryMask LoadMask(const std::filesystem::path& path) {
  const PngRaster raster = ReadPng(path);
  if (raster.channels != 1 || raster.bit_depth != 8) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": mask must be single-channel 8-bit, found " +
                    std::to_string(raster.channels) + " channel(s) at " +
                    std::to_string(raster.bit_depth) + " bits");
  }
  std::vector<uint8_t> values;
  values.reserve(raster.samples.size());
  for (uint16_t v : raster.samples) values.push_back(v != 0 ? 1 : 0);
  return BinaryMask(raster.width, raster.height, std::move(values));
}

SaliencyMap LoadSaliency(const std::filesystem::path& path, int width,
                         int height) {
  SaliencyMap s = LoadSaliency(path);
  CheckShape(path, s.width(), s.height(), width, height);
  return s;
}

BinaryMask LoadMask(const std::filesystem::path& path, int width, int height) {
  BinaryMask m = LoadMask(path);
  CheckShape(path, m.width(), m.height(), width, height);
  return m;
}

std::string ConvertMalariaExport(std::string_view json_text,
                                 ConversionStats* stats) {
  const json doc = ParseJson(json_text, "malaria export");
  if (!doc.is_array()) {
    throw Error(ErrorCode::kParseError,
                "malaria export: top level must be a list");
  }
  ConversionStats local;
  json out = json::array();
  for (size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "malaria export[" + std::to_string(i) + "]";
    const json& image = Field(doc[i], where, "image");
    std::string id = StringField(image, where + ".image", "pathname");
    if (!id.empty() && id.front() == '/') id.erase(0, 1);
    const json& shape = Field(image, where + ".image", "shape");
    const int height = IntField(shape, where + ".image.shape", "r");
    const int width = IntField(shape, where + ".image.shape", "c");
    json objects = json::array();
    const json& src = Field(doc[i], where, "objects");
    if (!src.is_array()) FieldError(where, "objects", "must be a list");
    for (size_t k = 0; k < src.size(); ++k) {
      const std::string owhere = where + ".objects[" + std::to_string(k) + "]";
      const std::string category = StringField(src[k], owhere, "category");
      try {
        GroupBinary(category);
      } catch (const Error&) {
        ++local.dropped_objects;
        continue;
      }
      const json& bb = Field(src[k], owhere, "bounding_box");
      const json& lo = Field(bb, owhere + ".bounding_box", "minimum");
      const json& hi = Field(bb, owhere + ".bounding_box", "maximum");
      const std::string lwhere = owhere + ".bounding_box.minimum";
      const std::string hwhere = owhere + ".bounding_box.maximum";
      objects.push_back(
          {{"category", category},
           {"bounding_box",
            {{"min_r", IntField(lo, lwhere, "r")},
             {"min_c", IntField(lo, lwhere, "c")},
             {"max_r", IntField(hi, hwhere, "r") - 1},
             {"max_c", IntField(hi, hwhere, "c") - 1}}}});
      ++local.objects;
    }
    out.push_back({{"image", id},
                   {"width", width},
                   {"height", height},
                   {"objects", std::move(objects)}});
    ++local.images;
  }
  if (stats != nullptr) *stats = local;
  return out.dump(2) + "\n";
}

}  // namespace salieval
