// Copyright 2026 The speechcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Helpers shared by the unit tests and the acceptance runner.

#ifndef SPEECHCURATE_TESTS_TEST_SUPPORT_H_
#define SPEECHCURATE_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "speechcurate/corpus.h"
#include "speechcurate/segmentation.h"
#include "speechcurate/util.h"

namespace speechcurate {
namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("speechcurate-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    if (!std::getenv("SPEECHCURATE_KEEP_TEMP")) std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline AudioAsset MakeAsset(const std::string& id, const std::string& dataset,
                            double duration_s = 100.0) {
  AudioAsset a;
  a.asset_id = id;
  a.source_dataset = dataset;
  a.uri = "/data/" + id + ".wav";
  a.duration_s = duration_s;
  a.license = "CC-BY-4.0";
  return a;
}

inline SegmentRecord MakeRecord(const std::string& id, const std::string& asset,
                                double start_s, double end_s,
                                const std::string& text = "hello world") {
  SegmentRecord r;
  r.segment_id = id;
  r.asset_id = asset;
  r.start_s = start_s;
  r.end_s = end_s;
  r.text = text;
  return r;
}

// Plain O(n*m) Levenshtein over words, written independently of the
// library's aligner. Returns the minimal edit count.
inline int64_t EditDistanceOracle(const std::vector<std::string>& ref,
                                  const std::vector<std::string>& hyp) {
  std::vector<std::vector<int64_t>> d(ref.size() + 1,
                                      std::vector<int64_t>(hyp.size() + 1, 0));
  for (size_t i = 0; i <= ref.size(); ++i) d[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= hyp.size(); ++j) d[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= ref.size(); ++i)
    for (size_t j = 1; j <= hyp.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)});
  return d[ref.size()][hyp.size()];
}

// Speech coverage of [start_s, end_s) counted on a 1 ms grid.
inline double CoverageOracle(double start_s, double end_s,
                             const std::vector<SpeechRegion>& regions) {
  const int64_t a = ToMillis(start_s);
  const int64_t b = ToMillis(end_s);
  if (b <= a) return 0.0;
  int64_t covered = 0;
  for (int64_t t = a; t < b; ++t) {
    const double mid = (static_cast<double>(t) + 0.5) / 1000.0;
    for (const auto& r : regions) {
      if (mid >= r.start_s && mid < r.end_s) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(b - a);
}

// Tied ranks by explicit pairwise counting: rank = 1 + #strictly worse +
// (#equal - 1) / 2. Independent of any sort-based implementation.
inline std::vector<double> PairwiseRanks(const std::vector<double>& v, bool higher_is_better) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    int64_t worse = 0;
    int64_t equal = 0;
    for (size_t j = 0; j < v.size(); ++j) {
      if (v[j] == v[i]) ++equal;
      else if (higher_is_better ? v[j] < v[i] : v[j] > v[i]) ++worse;
    }
    out[i] = 1.0 + static_cast<double>(worse) + static_cast<double>(equal - 1) / 2.0;
  }
  return out;
}

}  // namespace testing
}  // namespace speechcurate

#endif  // SPEECHCURATE_TESTS_TEST_SUPPORT_H_
