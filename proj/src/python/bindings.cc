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

// Python bindings. Rasters cross the boundary as numpy arrays: saliency as
// float64 (H, W), masks as uint8 (H, W), RGB images as uint8 (H, W, 3).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "salieval/core.h"
#include "salieval/ingest.h"
#include "salieval/metrics.h"
#include "salieval/pipeline.h"
#include "salieval/png_io.h"
#include "salieval/preprocess.h"
#include "salieval/report.h"

namespace py = pybind11;

namespace salieval {
namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;

void RequireDims(const py::array& a, int ndim, const char* what) {
  if (a.ndim() != ndim) {
    throw py::value_error(std::string(what) + " must be a " +
                          std::to_string(ndim) + "-D array");
  }
}

SaliencyMap ToSaliency(const DoubleArray& a) {
  RequireDims(a, 2, "saliency");
  const auto* p = a.data();
  return SaliencyMap(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                     std::vector<double>(p, p + a.size()));
}

BinaryMask ToMask(const ByteArray& a) {
  RequireDims(a, 2, "mask");
  const auto* p = a.data();
  return BinaryMask(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                    std::vector<uint8_t>(p, p + a.size()));
}

RgbImage ToRgb(const ByteArray& a) {
  RequireDims(a, 3, "image");
  if (a.shape(2) != 3) throw py::value_error("image must have 3 channels");
  const auto* p = a.data();
  return RgbImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                  std::vector<uint8_t>(p, p + a.size()));
}

py::array_t<double> FromSaliency(const SaliencyMap& s) {
  py::array_t<double> out({s.height(), s.width()});
  std::copy(s.values().begin(), s.values().end(), out.mutable_data());
  return out;
}

py::array_t<uint8_t> FromMask(const BinaryMask& m) {
  py::array_t<uint8_t> out({m.height(), m.width()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

py::array_t<uint8_t> FromRgb(const RgbImage& img) {
  py::array_t<uint8_t> out({img.height(), img.width(), 3});
  std::copy(img.channels().begin(), img.channels().end(), out.mutable_data());
  return out;
}

py::array_t<double> FromCurve(const std::vector<CurvePoint>& pts) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()),
                           py::ssize_t{2}});
  auto v = out.mutable_unchecked<2>();
  for (size_t i = 0; i < pts.size(); ++i) {
    v(i, 0) = pts[i].x;
    v(i, 1) = pts[i].y;
  }
  return out;
}

MaskSource SourceFromName(const std::string& name) {
  const auto s = ParseMaskSource(name);
  if (!s) throw py::value_error("unknown mask source '" + name + "'");
  return *s;
}

Rgb ToRgbTriple(const std::vector<int>& v) {
  if (v.size() != 3) throw py::value_error("color bound needs 3 channels");
  Rgb out;
  for (int k = 0; k < 3; ++k) {
    if (v[k] < 0 || v[k] > 255) throw py::value_error("channel out of range");
    out[k] = static_cast<uint8_t>(v[k]);
  }
  return out;
}

py::dict RecordToDict(const EvalRecord& r) {
  py::dict d;
  d["image_id"] = r.image_id;
  d["mask_source"] = std::string(MaskSourceName(r.mask_source));
  d["positives"] = r.positives;
  d["negatives"] = r.negatives;
  d["baseline_auprc"] = r.baseline_auprc;
  d["auprc"] = r.auprc;
  d["auc_judd"] = r.auc_judd;
  d["containment_in_box"] =
      r.containment_in_box ? py::cast(*r.containment_in_box) : py::none();
  return d;
}

}  // namespace
}  // namespace salieval

PYBIND11_MODULE(_salieval, m) {
  using namespace salieval;
  m.doc() = "Saliency localization metrics and image preprocessing";
  m.attr("__version__") = std::string(kVersion);

  static py::exception<Error> error_type(m, "SalievalError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args == (code_name, message)
      py::tuple args = py::make_tuple(std::string(ErrorCodeName(e.code())),
                                      std::string(e.what()));
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  // core
  m.def("normalize_saliency", [](const DoubleArray& raw) {
    RequireDims(raw, 2, "raw saliency");
    return FromSaliency(NormalizeSaliency(
        static_cast<int>(raw.shape(1)), static_cast<int>(raw.shape(0)),
        std::span<const double>(raw.data(), raw.size())));
  });
  m.def(
      "rasterize_box",
      [](int min_r, int min_c, int max_r, int max_c, int width, int height) {
        return FromMask(
            RasterizeBox({min_r, min_c, max_r, max_c}, width, height));
      },
      py::arg("min_r"), py::arg("min_c"), py::arg("max_r"), py::arg("max_c"),
      py::arg("width"), py::arg("height"));
  m.def("union_masks", [](const std::vector<ByteArray>& masks) {
    std::vector<BinaryMask> ms;
    for (const auto& a : masks) ms.push_back(ToMask(a));
    return FromMask(UnionMasks(ms));
  });
  m.def("containment", [](const ByteArray& inner, const ByteArray& outer) {
    return Containment(ToMask(inner), ToMask(outer));
  });
  m.def("mask_counts", [](const ByteArray& mask) {
    const MaskCounts c = CountMask(ToMask(mask));
    return py::make_tuple(c.positives, c.negatives);
  });

  // metrics
  m.def("roc_points_judd", [](const DoubleArray& s, const ByteArray& t) {
    return FromCurve(RocPointsJudd(ToSaliency(s), ToMask(t)));
  });
  m.def("auc_judd", [](const DoubleArray& s, const ByteArray& t) {
    return AucJudd(ToSaliency(s), ToMask(t));
  });
  m.def("pr_points", [](const DoubleArray& s, const ByteArray& t) {
    return FromCurve(PrPoints(ToSaliency(s), ToMask(t)));
  });
  m.def("auprc", [](const DoubleArray& s, const ByteArray& t) {
    return Auprc(ToSaliency(s), ToMask(t));
  });
  m.def("prevalence_baseline", [](const ByteArray& t) {
    return PrevalenceBaseline(ToMask(t));
  });
  m.def(
      "evaluate_pair",
      [](const std::string& image_id, const DoubleArray& s, const ByteArray& t,
         const std::string& source, std::optional<ByteArray> box_mask) {
        std::optional<BinaryMask> box;
        if (box_mask) box.emplace(ToMask(*box_mask));
        return RecordToDict(EvaluatePair(image_id, ToSaliency(s), ToMask(t),
                                         SourceFromName(source),
                                         box ? &*box : nullptr));
      },
      py::arg("image_id"), py::arg("saliency"), py::arg("truth"),
      py::arg("mask_source") = "annotation_box",
      py::arg("box_mask") = py::none());

  // preprocess
  m.def("rgb_to_lab", [](const ByteArray& img) {
    const LabImage lab = RgbToLab(ToRgb(img));
    py::array_t<double> out({lab.height(), lab.width(), 3});
    double* o = out.mutable_data();
    for (const Lab& p : lab.pixels()) {
      *o++ = p.l;
      *o++ = p.a;
      *o++ = p.b;
    }
    return out;
  });
  m.def("lab_to_rgb", [](const DoubleArray& lab) {
    RequireDims(lab, 3, "Lab image");
    if (lab.shape(2) != 3) throw py::value_error("Lab image needs 3 channels");
    std::vector<Lab> px;
    const double* p = lab.data();
    for (py::ssize_t i = 0; i < lab.shape(0) * lab.shape(1); ++i) {
      px.push_back({p[3 * i], p[3 * i + 1], p[3 * i + 2]});
    }
    return FromRgb(LabToRgb(LabImage(static_cast<int>(lab.shape(1)),
                                     static_cast<int>(lab.shape(0)),
                                     std::move(px))));
  });
  m.def(
      "clahe_l",
      [](const ByteArray& img, int tiles_x, int tiles_y, double clip_limit) {
        return FromRgb(ClaheL(ToRgb(img), {tiles_x, tiles_y, clip_limit}));
      },
      py::arg("image"), py::arg("tiles_x") = 8, py::arg("tiles_y") = 8,
      py::arg("clip_limit") = 2.0);
  m.def("color_range_mask", [](const ByteArray& img, const std::vector<int>& lo,
                               const std::vector<int>& hi) {
    return FromMask(ColorRangeMask(ToRgb(img), ToRgbTriple(lo), ToRgbTriple(hi)));
  });
  m.def(
      "morph_refine",
      [](const ByteArray& mask, int kernel, bool fill_holes) {
        return FromMask(MorphRefine(ToMask(mask), kernel, fill_holes));
      },
      py::arg("mask"), py::arg("kernel") = 3, py::arg("fill_holes") = true);
  m.def("linear_contrast", [](const ByteArray& img, double alpha, double beta) {
    return FromRgb(LinearContrast(ToRgb(img), alpha, beta));
  });
  m.def("weighted_blend", [](const ByteArray& original,
                             const ByteArray& enhanced, double w) {
    return FromRgb(WeightedBlend(ToRgb(original), ToRgb(enhanced), w));
  });
  m.def(
      "preprocess",
      [](const ByteArray& img, const std::string& method, int tiles_x,
         int tiles_y, double clip_limit, int kernel, bool fill_holes,
         double alpha, double beta, double blend, const std::vector<int>& lo,
         const std::vector<int>& hi) {
        const auto parsed = ParsePreprocessMethod(method);
        if (!parsed) throw py::value_error("unknown method '" + method + "'");
        PreprocessParams params;
        params.clahe = {tiles_x, tiles_y, clip_limit};
        params.kernel = kernel;
        params.fill_holes = fill_holes;
        params.alpha = alpha;
        params.beta = beta;
        params.blend_weight = blend;
        params.lower = ToRgbTriple(lo);
        params.upper = ToRgbTriple(hi);
        return FromRgb(RunPreprocess(ToRgb(img), *parsed, params));
      },
      py::arg("image"), py::arg("method") = "clahe", py::arg("tiles_x") = 8,
      py::arg("tiles_y") = 8, py::arg("clip_limit") = 2.0,
      py::arg("kernel") = 3, py::arg("fill_holes") = true,
      py::arg("alpha") = 1.0, py::arg("beta") = 0.0, py::arg("blend") = 0.5,
      py::arg("lower") = std::vector<int>{0, 0, 0},
      py::arg("upper") = std::vector<int>{255, 255, 255});

  // ingest + files
  m.def("group_binary", [](const std::string& category) {
    return GroupBinary(category) == InfectionLabel::kInfected ? "infected"
                                                              : "uninfected";
  });
  m.def("load_annotations", [](const std::filesystem::path& path) {
    py::list out;
    for (const ImageEntry& e : LoadAnnotations(path)) {
      py::dict d;
      d["image_id"] = e.image_id;
      d["width"] = e.width;
      d["height"] = e.height;
      d["evaluable"] = e.Evaluable();
      py::list objects;
      for (const AnnotationRecord& a : e.annotations) {
        objects.append(py::dict(
            py::arg("category") = a.category,
            py::arg("box") = py::make_tuple(a.box.min_r, a.box.min_c,
                                            a.box.max_r, a.box.max_c),
            py::arg("infected") = a.label == InfectionLabel::kInfected));
      }
      d["objects"] = objects;
      out.append(d);
    }
    return out;
  });
  m.def("load_saliency", [](const std::filesystem::path& p) {
    return FromSaliency(LoadSaliency(p));
  });
  m.def("load_mask", [](const std::filesystem::path& p) {
    return FromMask(LoadMask(p));
  });
  m.def("write_saliency_png", [](const std::filesystem::path& p,
                                 const DoubleArray& s) {
    WriteSaliencyPng(p, ToSaliency(s));
  });
  m.def("write_mask_png", [](const std::filesystem::path& p,
                             const ByteArray& mask) {
    WriteMaskPng(p, ToMask(mask));
  });

  // pipeline
  m.def(
      "run_eval",
      [](const std::filesystem::path& manifest,
         const std::filesystem::path& out_dir,
         const std::vector<std::string>& sources, int bins, int workers,
         bool write_svg) {
        RunConfig config;
        config.manifest = manifest;
        config.out_dir = out_dir;
        config.sources.clear();
        for (const auto& s : sources) config.sources.push_back(SourceFromName(s));
        config.bins = bins;
        config.workers = workers;
        config.write_svg = write_svg;
        EvalOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = RunEval(config);
        }
        py::list records;
        for (const auto& r : outcome.records) records.append(RecordToDict(r));
        ReportOptions options;
        options.version = std::string(kVersion);
        options.config = ConfigEcho(config);
        py::dict result;
        result["records"] = records;
        result["summary_json"] =
            SummaryToJson(outcome.summary, outcome.comparison, options).dump();
        result["failures"] = outcome.failures;
        return result;
      },
      py::arg("manifest"), py::arg("out_dir"),
      py::arg("sources") =
          std::vector<std::string>{"annotation_box", "external_mask"},
      py::arg("bins") = 20, py::arg("workers") = 0,
      py::arg("write_svg") = false);
  m.def("rasterize_annotations", [](const std::filesystem::path& annotations,
                                    const std::filesystem::path& out_dir) {
    const RasterizeOutcome o = RasterizeAnnotations(annotations, out_dir);
    return py::make_tuple(o.written, o.skipped_ids);
  });
}
