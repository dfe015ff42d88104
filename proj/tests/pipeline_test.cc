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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <random>

#include "json.hpp"
#include "salieval/png_io.h"
#include "test_util.h"

namespace salieval {
namespace {

using ::nlohmann::json;
using ::salieval::testing::ReadFile;
using ::salieval::testing::ScratchDir;
using ::salieval::testing::WriteFile;

int RunCli(const std::string& args) {
  const std::string cmd = std::string(SALIEVAL_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json Object(const std::string& category, int min_r, int min_c, int max_r,
            int max_c) {
  return {{"category", category},
          {"bounding_box",
           {{"min_r", min_r}, {"min_c", min_c}, {"max_r", max_r},
            {"max_c", max_c}}}};
}

// Three evaluable 6x5 images with one infected box and one external mask
// each, plus one image with only uninfected cells.
void WriteDataset(const std::filesystem::path& dir) {
  std::mt19937_64 rng(41);
  json doc = json::array();
  std::string manifest = "image_id,annotation_path,saliency_path,mask_paths\n";
  for (int i = 0; i < 4; ++i) {
    const std::string id = "cell" + std::to_string(i) + ".png";
    const bool infected = i < 3;
    doc.push_back({{"image", id},
                   {"width", 6},
                   {"height", 5},
                   {"objects",
                    {Object(infected ? "ring" : "red blood cell", 1, 1, 3, 3 + (i % 2))}}});
    WriteSaliencyPng(dir / ("sal" + std::to_string(i) + ".png"),
                     testing::RandomSaliency(rng, 6, 5, 9));
    std::vector<uint8_t> m(30, 0);
    m[2 * 6 + 2] = 1;
    m[1 * 6 + 1] = 1;
    WriteMaskPng(dir / ("mask" + std::to_string(i) + ".png"), BinaryMask(6, 5, m));
    manifest += id + ",ann.json,sal" + std::to_string(i) + ".png," +
                (infected ? "mask" + std::to_string(i) + ".png" : "") + "\n";
  }
  WriteFile(dir / "ann.json", doc.dump(2));
  WriteFile(dir / "manifest.csv", manifest);
}

TEST(RunEvalTest, ThreeImagesBothSources) {
  ScratchDir dir("eval3");
  WriteDataset(dir.path());
  RunConfig config;
  config.manifest = dir / "manifest.csv";
  config.out_dir = dir / "out";
  config.workers = 2;
  const EvalOutcome outcome = RunEval(config);
  EXPECT_EQ(outcome.records.size(), 6u);
  EXPECT_EQ(outcome.failures, 0);
  for (const SourceSummary& s : outcome.summary.sources) {
    EXPECT_EQ(s.evaluated, 3);
    EXPECT_EQ(s.skipped, 1);
    EXPECT_EQ(s.skipped_ids, std::vector<std::string>{"cell3.png"});
  }
  ASSERT_TRUE(outcome.comparison.has_value());
  EXPECT_EQ(outcome.comparison->containment_records, 3);
  EXPECT_EQ(outcome.comparison->containment_at_one, 3);
  EXPECT_EQ(outcome.histograms.size(), 4u);

  // Every record agrees with a direct evaluation of the loaded inputs.
  const auto entries = LoadManifest(config.manifest);
  for (const EvalRecord& r : outcome.records) {
    const auto it = std::find_if(entries.begin(), entries.end(), [&](auto& e) {
      return e.image_id == r.image_id;
    });
    ASSERT_NE(it, entries.end());
    const SaliencyMap s = LoadSaliency(it->saliency_path);
    const BinaryMask truth = GroundTruthMask(*it, r.mask_source);
    EXPECT_EQ(r.auc_judd, testing::JuddOracle(s, truth));
    EXPECT_EQ(r.auprc, testing::AuprcOracle(s, truth));
  }
  const std::string csv = ReadFile(dir / "out" / "records.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.json"));
  EXPECT_TRUE(
      std::filesystem::exists(dir / "out" / "histogram_auprc_external_mask.csv"));
}

TEST(RunEvalTest, SingleSourceHasNoComparison) {
  ScratchDir dir("eval1");
  WriteDataset(dir.path());
  RunConfig config;
  config.manifest = dir / "manifest.csv";
  config.out_dir = dir / "out";
  config.sources = {MaskSource::kAnnotationBox};
  const EvalOutcome outcome = RunEval(config);
  EXPECT_EQ(outcome.records.size(), 3u);
  EXPECT_FALSE(outcome.comparison.has_value());
  const json doc = json::parse(ReadFile(dir / "out" / "summary.json"));
  EXPECT_TRUE(doc["comparison"].is_null());
  EXPECT_FALSE(doc["sources"].contains("external_mask"));
}

TEST(RunEvalTest, WorkerCountDoesNotChangeOutput) {
  ScratchDir dir("workers");
  WriteDataset(dir.path());
  std::string reference;
  for (int workers : {1, 2, 8}) {
    RunConfig config;
    config.manifest = dir / "manifest.csv";
    config.out_dir = dir / ("out" + std::to_string(workers));
    config.workers = workers;
    RunEval(config);
    const std::string both = ReadFile(config.out_dir / "records.csv") +
                             ReadFile(config.out_dir / "summary.json");
    if (reference.empty()) reference = both;
    EXPECT_EQ(both, reference) << workers;
  }
}

TEST(RunEvalTest, CorruptSaliencyIsPerImageFailure) {
  ScratchDir dir("corrupt");
  WriteDataset(dir.path());
  WriteFile(dir / "sal1.png", "garbage");
  RunConfig config;
  config.manifest = dir / "manifest.csv";
  config.out_dir = dir / "out";
  const EvalOutcome outcome = RunEval(config);
  EXPECT_EQ(outcome.records.size(), 4u);
  EXPECT_EQ(outcome.failures, 2);
}

TEST(RunEvalTest, MissingInputIsFatal) {
  ScratchDir dir("missing");
  WriteDataset(dir.path());
  std::filesystem::remove(dir / "mask0.png");
  RunConfig config;
  config.manifest = dir / "manifest.csv";
  config.out_dir = dir / "out";
  try {
    RunEval(config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
    EXPECT_NE(std::string(e.what()).find("mask0.png"), std::string::npos);
  }
}

TEST(RunEvalTest, DumpCurves) {
  ScratchDir dir("curves");
  WriteDataset(dir.path());
  RunConfig config;
  config.manifest = dir / "manifest.csv";
  config.out_dir = dir / "out";
  config.dump_curves = true;
  RunEval(config);
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "out" / "curves")) {
    EXPECT_EQ(ReadFile(e.path()).rfind("x,y\n", 0), 0u);
    ++files;
  }
  EXPECT_EQ(files, 12);
}

TEST(MaskFileNameTest, Sanitizes) {
  EXPECT_EQ(MaskFileName("abc.jpg"), "abc.png");
  EXPECT_EQ(MaskFileName("images/x y.png"), "images_x_y.png");
}

TEST(CliTest, EvalExitCodes) {
  ScratchDir dir("cli_eval");
  WriteDataset(dir.path());
  const std::string manifest = (dir / "manifest.csv").string();
  EXPECT_EQ(RunCli("eval --manifest " + manifest + " --out " +
                   (dir / "a").string() + " --workers 3 --svg"),
            0);
  EXPECT_TRUE(std::filesystem::exists(
      dir / "a" / "histogram_auc_judd_annotation_box.svg"));
  EXPECT_EQ(RunCli("eval --manifest " + manifest + " --out " +
                   (dir / "b").string() + " --workers 1 --svg"),
            0);
  EXPECT_EQ(ReadFile(dir / "a" / "summary.json"),
            ReadFile(dir / "b" / "summary.json"));
  EXPECT_EQ(ReadFile(dir / "a" / "records.csv"),
            ReadFile(dir / "b" / "records.csv"));
  EXPECT_EQ(RunCli("eval --manifest " + manifest + " --out " +
                   (dir / "c").string() + " --sources external_mask"),
            0);
  const std::string csv = ReadFile(dir / "c" / "records.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(RunCli("eval --manifest " + (dir / "nope.csv").string() +
                   " --out " + (dir / "d").string()),
            2);
  EXPECT_EQ(RunCli("eval --manifest " + manifest + " --out " +
                   (dir / "e").string() + " --sources bogus"),
            2);
  WriteFile(dir / "sal0.png", "garbage");
  EXPECT_EQ(RunCli("eval --manifest " + manifest + " --out " +
                   (dir / "f").string()),
            1);
  EXPECT_NE(RunCli("frobnicate"), 0);
}

TEST(CliTest, Rasterize) {
  ScratchDir dir("cli_raster");
  WriteDataset(dir.path());
  ASSERT_EQ(RunCli("rasterize --annotations " + (dir / "ann.json").string() +
                   " --out " + (dir / "masks").string()),
            0);
  for (int i = 0; i < 3; ++i) {
    const BinaryMask m =
        LoadMask(dir / "masks" / ("cell" + std::to_string(i) + ".png"));
    EXPECT_EQ(m, RasterizeBox({1, 1, 3, 3 + (i % 2)}, 6, 5));
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "masks" / "cell3.png"));
}

TEST(CliTest, PreprocessRangeMorph) {
  ScratchDir dir("cli_pre");
  std::filesystem::create_directories(dir / "in");
  std::vector<uint8_t> ch(8 * 8 * 3, 20);
  auto set = [&](int r, int c, Rgb v) {
    for (int k = 0; k < 3; ++k) ch[(r * 8 + c) * 3 + k] = v[k];
  };
  for (int r = 2; r <= 5; ++r) {
    for (int c = 2; c <= 5; ++c) set(r, c, {200, 60, 70});
  }
  set(3, 3, {10, 10, 10});
  set(0, 7, {210, 50, 50});
  WriteRgbPng(dir / "in" / "fixture.png", RgbImage(8, 8, ch));
  WriteFile(dir / "in" / "notes.txt", "ignored");
  ASSERT_EQ(RunCli("preprocess --in " + (dir / "in").string() + " --out " +
                   (dir / "out").string() +
                   " --method range_morph --lower 150,0,0 --upper 255,100,100"
                   " --kernel 3 --beta 10"),
            0);
  const RgbImage out = ReadRgbPng(dir / "out" / "fixture.png");
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      Rgb expected{10, 10, 10};
      if (r >= 2 && r <= 5 && c >= 2 && c <= 5) expected = {210, 70, 80};
      if (r == 3 && c == 3) expected = {20, 20, 20};
      EXPECT_EQ(out.at(r, c), expected) << r << "," << c;
    }
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "out" / "notes.txt"));
  EXPECT_EQ(RunCli("preprocess --in " + (dir / "in").string() + " --out " +
                   (dir / "clahe").string() + " --method clahe --tiles-x 2 --tiles-y 2"),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir / "clahe" / "fixture.png"));
  EXPECT_NE(RunCli("preprocess --in " + (dir / "in").string() + " --out " +
                   (dir / "bad").string() + " --method sharpen"),
            0);
}

TEST(CliTest, Convert) {
  ScratchDir dir("cli_convert");
  const json src = json::array(
      {{{"image", {{"pathname", "/images/a.png"}, {"shape", {{"r", 4}, {"c", 5}}}}},
        {"objects",
         {{{"category", "ring"},
           {"bounding_box",
            {{"minimum", {{"r", 0}, {"c", 0}}}, {"maximum", {{"r", 4}, {"c", 5}}}}}}}}}});
  WriteFile(dir / "src.json", src.dump());
  ASSERT_EQ(RunCli("convert --input " + (dir / "src.json").string() +
                   " --output " + (dir / "ann.json").string()),
            0);
  const auto entries = LoadAnnotations(dir / "ann.json");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].annotations[0].box.Area(), 20);
}

}  // namespace
}  // namespace salieval
