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

// Command-line front end: eval, rasterize, preprocess, convert.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "salieval/ingest.h"
#include "salieval/pipeline.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

std::vector<std::string> SplitComma(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

salieval::Rgb ParseRgb(const std::string& text) {
  const auto parts = SplitComma(text);
  if (parts.size() != 3) {
    throw CLI::ValidationError("color", "expected R,G,B, got '" + text + "'");
  }
  salieval::Rgb rgb;
  for (int k = 0; k < 3; ++k) {
    const int v = std::stoi(parts[k]);
    if (v < 0 || v > 255) {
      throw CLI::ValidationError("color", "channel out of [0,255]: " + text);
    }
    rgb[k] = static_cast<uint8_t>(v);
  }
  return rgb;
}

int RunEvalCommand(salieval::RunConfig config, const std::string& sources) {
  config.sources.clear();
  for (const auto& name : SplitComma(sources)) {
    const auto source = salieval::ParseMaskSource(name);
    if (!source) {
      std::cerr << "unknown mask source '" << name << "'\n";
      return kExitFatal;
    }
    config.sources.push_back(*source);
  }
  const salieval::EvalOutcome outcome = salieval::RunEval(config, &std::cerr);
  for (const auto& s : outcome.summary.sources) {
    std::cout << salieval::MaskSourceName(s.source) << ": evaluated "
              << s.evaluated << ", skipped " << s.skipped;
    if (s.mean_auprc) {
      std::cout << ", mean AUPRC " << *s.mean_auprc << ", mean AUC-Judd "
                << *s.mean_auc_judd;
    }
    std::cout << "\n";
  }
  if (outcome.failures > 0) {
    std::cerr << outcome.failures << " image/source pair(s) failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saliency localization evaluation toolkit"};
  app.set_version_flag("--version", std::string(salieval::kVersion));
  app.require_subcommand(1);

  salieval::RunConfig eval_config;
  std::string sources = "annotation_box,external_mask";
  auto* eval = app.add_subcommand("eval", "Score saliency maps against ground truth");
  eval->add_option("--manifest", eval_config.manifest, "Manifest CSV")
      ->required();
  eval->add_option("--out", eval_config.out_dir, "Report directory")->required();
  eval->add_option("--sources", sources,
                   "Comma-separated mask sources (annotation_box,external_mask)")
      ->capture_default_str();
  eval->add_option("--bins", eval_config.bins, "Histogram bins")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  eval->add_option("--workers", eval_config.workers,
                   "Worker threads (0 = machine parallelism)")
      ->check(CLI::NonNegativeNumber);
  eval->add_flag("--svg", eval_config.write_svg, "Also write SVG histograms");
  eval->add_flag("--dump-curves", eval_config.dump_curves,
                 "Write per-image ROC and PR curves");

  std::string annotations;
  std::string raster_out;
  auto* rasterize =
      app.add_subcommand("rasterize", "Write one box mask PNG per image");
  rasterize->add_option("--annotations", annotations, "Annotation JSON")
      ->required()
      ->check(CLI::ExistingFile);
  rasterize->add_option("--out", raster_out, "Output directory")->required();

  std::string in_dir;
  std::string pre_out;
  std::string method_name = "clahe";
  std::string lower = "0,0,0";
  std::string upper = "255,255,255";
  bool no_fill = false;
  int pre_workers = 0;
  salieval::PreprocessParams params;
  auto* preprocess =
      app.add_subcommand("preprocess", "Enhance RGB PNG images");
  preprocess->add_option("--in", in_dir, "Input directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  preprocess->add_option("--out", pre_out, "Output directory")->required();
  preprocess
      ->add_option("--method", method_name,
                   "range_morph, clahe or clahe_blend")
      ->capture_default_str()
      ->check(CLI::IsMember({"range_morph", "clahe", "clahe_blend"}));
  preprocess->add_option("--tiles-x", params.clahe.tiles_x)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  preprocess->add_option("--tiles-y", params.clahe.tiles_y)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  preprocess->add_option("--clip-limit", params.clahe.clip_limit)
      ->capture_default_str()
      ->check(CLI::Range(1.0, 1e300));
  preprocess->add_option("--kernel", params.kernel, "Odd structuring element side")
      ->capture_default_str();
  preprocess->add_flag("--no-fill-holes", no_fill);
  preprocess->add_option("--alpha", params.alpha, "Contrast gain")
      ->capture_default_str();
  preprocess->add_option("--beta", params.beta, "Brightness bias")
      ->capture_default_str();
  preprocess->add_option("--blend", params.blend_weight,
                         "Weight of the equalized image in clahe_blend")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  preprocess->add_option("--lower", lower, "Color range lower bound R,G,B")
      ->capture_default_str();
  preprocess->add_option("--upper", upper, "Color range upper bound R,G,B")
      ->capture_default_str();
  preprocess->add_option("--workers", pre_workers)->check(CLI::NonNegativeNumber);

  std::string convert_in;
  std::string convert_out;
  auto* convert = app.add_subcommand(
      "convert", "Convert the public malaria box export to annotation JSON");
  convert->add_option("--input", convert_in)->required()->check(CLI::ExistingFile);
  convert->add_option("--output", convert_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) return RunEvalCommand(eval_config, sources);

    if (*rasterize) {
      const auto outcome =
          salieval::RasterizeAnnotations(annotations, raster_out);
      std::cout << "wrote " << outcome.written.size() << " mask(s)";
      if (!outcome.skipped_ids.empty()) {
        std::cout << ", " << outcome.skipped_ids.size()
                  << " image(s) without infected cells";
      }
      std::cout << "\n";
      return kExitOk;
    }

    if (*preprocess) {
      params.fill_holes = !no_fill;
      params.lower = ParseRgb(lower);
      params.upper = ParseRgb(upper);
      const auto method = *salieval::ParsePreprocessMethod(method_name);
      const auto outcome = salieval::PreprocessDirectory(
          in_dir, pre_out, method, params, pre_workers, &std::cerr);
      std::cout << "wrote " << outcome.written.size() << " image(s)\n";
      return outcome.failures.empty() ? kExitOk : kExitPartial;
    }

    if (*convert) {
      std::ifstream in(convert_in, std::ios::binary);
      std::stringstream text;
      text << in.rdbuf();
      salieval::ConversionStats stats;
      const std::string doc =
          salieval::ConvertMalariaExport(text.str(), &stats);
      std::ofstream out(convert_out, std::ios::binary);
      out << doc;
      if (!out) {
        std::cerr << "cannot write " << convert_out << "\n";
        return kExitFatal;
      }
      std::cout << "converted " << stats.images << " image(s), "
                << stats.objects << " object(s); dropped "
                << stats.dropped_objects << " with unknown categories\n";
      return kExitOk;
    }
  } catch (const salieval::Error& e) {
    std::cerr << salieval::ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitOk;
}
