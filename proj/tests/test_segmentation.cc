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

#include <cmath>

#include "doctest.h"
#include "speechcurate/segmentation.h"
#include "speechcurate/synth.h"
#include "test_support.h"

using namespace speechcurate;

namespace {

std::vector<SpeechRegion> R(std::initializer_list<std::pair<double, double>> v) {
  std::vector<SpeechRegion> out;
  for (auto [s, e] : v) out.push_back({s, e});
  return out;
}

}  // namespace

TEST_SUITE("segmentation") {

TEST_CASE("config validation") {
  SegmenterConfig c;
  CHECK_NOTHROW(c.Validate());
  c.min_segment_s = 40.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = {};
  c.hop_ms = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("external vad import sorts, merges and validates") {
  auto r = ImportExternalVad({{5.0, 6.0}, {1.0, 2.0}, {1.5, 3.0}});
  CHECK(r == R({{1.0, 3.0}, {5.0, 6.0}}));
  CHECK_THROWS_AS(ImportExternalVad({{2.0, 2.0}}), ValidationError);
  CHECK_THROWS_AS(ImportExternalVad({{0.0, NAN}}), ValidationError);
}

TEST_CASE("regions are merged across short gaps and cut at long ones") {
  SegmenterConfig c;
  auto segs = SegmentsFromRegions(R({{0.0, 2.0}, {2.3, 5.0}, {7.0, 12.0}}), c, "rec");
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].start_s == 0.0);
  CHECK(segs[0].end_s == 5.0);
  CHECK(segs[0].segment_id == "rec_00000");
  CHECK(segs[1].start_s == 7.0);
  CHECK(segs[1].segment_id == "rec_00001");
}

TEST_CASE("short pieces are dropped") {
  SegmenterConfig c;
  auto segs = SegmentsFromRegions(R({{0.0, 2.9}, {10.0, 13.0}}), c, "x");
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].duration_s() == doctest::Approx(3.0));
}

TEST_CASE("long groups split at the longest internal gap") {
  SegmenterConfig c;
  // 0..14 and 14.4..20 are joined by a 0.4 s gap, 20.45..40 by a 0.45 s gap.
  auto segs = SegmentsFromRegions(R({{0.0, 14.0}, {14.4, 20.0}, {20.45, 40.0}}), c, "x");
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].end_s == doctest::Approx(20.0));
  CHECK(segs[1].start_s == doctest::Approx(20.45));
}

TEST_CASE("a single long region is chunked") {
  SegmenterConfig c;
  auto segs = SegmentsFromRegions(R({{0.0, 70.0}}), c, "x");
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].duration_s() == doctest::Approx(30.0));
  CHECK(segs[1].duration_s() == doctest::Approx(30.0));
  CHECK(segs[2].duration_s() == doctest::Approx(10.0));
  auto tail = SegmentsFromRegions(R({{0.0, 61.0}}), c, "x");
  CHECK(tail.size() == 2);  // the 1 s remainder is dropped
}

TEST_CASE("segment durations stay within bounds for random regions") {
  Rng rng(17);
  SegmenterConfig c;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SpeechRegion> regions;
    double t = rng.UniformReal();
    for (int k = 0; k < 30; ++k) {
      const double len = RoundToMillis(0.1 + rng.UniformReal() * 45.0);
      regions.push_back({RoundToMillis(t), RoundToMillis(t + len)});
      t += len + 0.01 + rng.UniformReal() * 1.5;
    }
    double prev_end = -1.0;
    for (const auto& s : SegmentsFromRegions(regions, c, "r")) {
      CHECK(s.duration_s() >= c.min_segment_s - 1e-9);
      CHECK(s.duration_s() <= c.max_segment_s + 1e-9);
      CHECK(s.start_s >= prev_end);
      prev_end = s.end_s;
    }
  }
}

TEST_CASE("speech ratio agrees with a millisecond grid count") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SpeechRegion> regions;
    double t = 0.0;
    for (int k = 0; k < 10; ++k) {
      const double s = t + RoundToMillis(rng.UniformReal() * 2.0);
      const double e = s + RoundToMillis(0.001 + rng.UniformReal() * 3.0);
      regions.push_back({s, e});
      t = e + 0.001;
    }
    const double a = RoundToMillis(rng.UniformReal() * 20.0);
    const double b = a + RoundToMillis(0.5 + rng.UniformReal() * 10.0);
    const double got = SpeechRatio(a, b, regions);
    CHECK(got == doctest::Approx(testing::CoverageOracle(a, b, regions)).epsilon(1e-9));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
  CHECK(SpeechRatio(0.0, 1.0, {}) == 0.0);
  CHECK(SpeechRatio(2.0, 4.0, R({{0.0, 10.0}})) == 1.0);
}

TEST_CASE("vad recovers a planted layout") {
  Rng rng(3);
  const PlantedLayout layout = RandomLayout(rng, 60.0);
  const Waveform w = RenderLayout(layout, 16000, 1, -20.0, -60.0, rng);
  const auto frames = DetectSpeechFrames(w.samples, w.sample_rate_hz);
  for (const auto& s : SegmentsFromRegions(DetectSpeechRegions(w.samples, w.sample_rate_hz), {},
                                           "x")) {
    CHECK(std::abs(SpeechRatio(s, frames) - PlantedRatio(layout, s.start_s, s.end_s)) < 0.05);
  }
  // Every region boundary sits on the millisecond grid.
  for (const auto& r : DetectSpeechRegions(w.samples, w.sample_rate_hz)) {
    CHECK(r.start_s == RoundToMillis(r.start_s));
    CHECK(r.end_s == RoundToMillis(r.end_s));
    CHECK(r.start_s >= 0.0);
    CHECK(r.end_s <= w.duration_s() + 1e-9);
  }
}

TEST_CASE("vad edge cases") {
  std::vector<float> silence(16000 * 2, 0.0f);
  CHECK(DetectSpeechRegions(silence, 16000).empty());
  std::vector<float> tone(16000 * 2);
  for (size_t i = 0; i < tone.size(); ++i) tone[i] = 0.3f * std::sin(0.2f * static_cast<float>(i));
  auto r = DetectSpeechRegions(tone, 16000);
  REQUIRE(r.size() == 1);
  CHECK(r[0].start_s == 0.0);
  CHECK(r[0].end_s == doctest::Approx(2.0));
  CHECK(DetectSpeechRegions({}, 16000).empty());
}

}  // TEST_SUITE
