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

// Shared test helpers: random instance generators, brute-force metric
// oracles, and scratch directories. The oracles deliberately avoid the
// library's sort-and-sweep path: they rescan the whole image per threshold.

#ifndef SALIEVAL_TESTS_TEST_UTIL_H_
#define SALIEVAL_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "salieval/core.h"
#include "salieval/metrics.h"

namespace salieval::testing {

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("salieval_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path& path,
                      const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Saliency drawn from a coarse grid of `levels` values so ties are common.
inline SaliencyMap RandomSaliency(std::mt19937_64& rng, int width, int height,
                                  int levels) {
  std::uniform_int_distribution<int> pick(0, levels - 1);
  std::vector<double> v(static_cast<size_t>(width) * height);
  for (double& x : v) x = static_cast<double>(pick(rng)) / (levels - 1);
  return SaliencyMap(width, height, std::move(v));
}

// Tie-free saliency: a random permutation of k / (n - 1).
inline SaliencyMap RandomTieFreeSaliency(std::mt19937_64& rng, int width,
                                         int height) {
  const int n = width * height;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
  }
  std::shuffle(v.begin(), v.end(), rng);
  return SaliencyMap(width, height, std::move(v));
}

inline BinaryMask RandomMask(std::mt19937_64& rng, int width, int height,
                             double density) {
  std::bernoulli_distribution on(density);
  std::vector<uint8_t> v(static_cast<size_t>(width) * height);
  for (auto& x : v) x = on(rng) ? 1 : 0;
  return BinaryMask(width, height, std::move(v));
}

// Random mask with at least one positive and one negative (needs >= 2 px).
inline BinaryMask RandomNondegenerateMask(std::mt19937_64& rng, int width,
                                          int height) {
  std::uniform_real_distribution<double> density(0.05, 0.95);
  const int n = width * height;
  std::uniform_int_distribution<int> px(0, n - 1);
  BinaryMask m = RandomMask(rng, width, height, density(rng));
  std::vector<uint8_t> vals(m.values().begin(), m.values().end());
  const int a = px(rng);
  int b = px(rng);
  while (b == a) b = px(rng);
  vals[a] = 1;
  vals[b] = 0;
  return BinaryMask(width, height, std::move(vals));
}

// Exhaustive-threshold AUC-Judd: every distinct positive-pixel value is a
// threshold; each threshold rescans the whole image.
inline double JuddOracle(const SaliencyMap& s, const BinaryMask& m) {
  const auto sal = s.values();
  const auto lab = m.values();
  std::set<double, std::greater<>> thresholds;
  int64_t p = 0;
  int64_t n = 0;
  for (size_t i = 0; i < sal.size(); ++i) {
    if (lab[i]) {
      thresholds.insert(sal[i]);
      ++p;
    } else {
      ++n;
    }
  }
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (double t : thresholds) {
    int64_t tp = 0;
    int64_t fp = 0;
    for (size_t i = 0; i < sal.size(); ++i) {
      if (sal[i] >= t) (lab[i] ? tp : fp)++;
    }
    pts.emplace_back(static_cast<double>(fp) / n, static_cast<double>(tp) / p);
  }
  pts.emplace_back(1.0, 1.0);
  double area = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) *
            (pts[i].second + pts[i - 1].second) / 2.0;
  }
  return area;
}

// Cumulative-count AUPRC: for each distinct value, high to low, count every
// pixel at or above it.
inline double AuprcOracle(const SaliencyMap& s, const BinaryMask& m) {
  const auto sal = s.values();
  const auto lab = m.values();
  std::set<double, std::greater<>> levels(sal.begin(), sal.end());
  int64_t p = 0;
  for (uint8_t v : lab) p += v;
  double area = 0.0;
  double prev_recall = 0.0;
  for (double t : levels) {
    int64_t tp = 0;
    int64_t fp = 0;
    for (size_t i = 0; i < sal.size(); ++i) {
      if (sal[i] >= t) (lab[i] ? tp : fp)++;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(p);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

inline SaliencyMap Transform(const SaliencyMap& s,
                             const std::function<double(double)>& f) {
  std::vector<double> v;
  for (double x : s.values()) v.push_back(f(x));
  return SaliencyMap(s.width(), s.height(), std::move(v));
}

}  // namespace salieval::testing

#endif  // SALIEVAL_TESTS_TEST_UTIL_H_
