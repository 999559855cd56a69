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
#include <numbers>

#include "doctest.h"
#include "speechcurate/audio.h"
#include "speechcurate/audio_codec.h"
#include "speechcurate/resample.h"
#include "test_support.h"

using namespace speechcurate;
using testing::TempDir;

namespace {

std::vector<float> Tone(double hz, int rate, double seconds, double amp = 0.5) {
  std::vector<float> s(static_cast<size_t>(seconds * rate));
  for (size_t i = 0; i < s.size(); ++i)
    s[i] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * i / rate));
  return s;
}

double CentreRms(const std::vector<float>& s) {
  const size_t a = s.size() / 4, b = 3 * s.size() / 4;
  double acc = 0.0;
  for (size_t i = a; i < b; ++i) acc += static_cast<double>(s[i]) * s[i];
  return std::sqrt(acc / static_cast<double>(b - a));
}

}  // namespace

TEST_SUITE("audio") {

TEST_CASE("level meters") {
  std::vector<float> silent(100, 0.0f);
  CHECK(std::isinf(RmsDbfs(silent)));
  std::vector<float> full(100, 1.0f);
  CHECK(RmsDbfs(full) == doctest::Approx(0.0));
  std::vector<float> half(100, -0.5f);
  CHECK(PeakDbfs(half) == doctest::Approx(-6.0206).epsilon(1e-3));
}

TEST_CASE("resampler keeps the passband and rejects aliases") {
  const auto pass = Resample(Tone(1000.0, 48000, 1.0), 48000, 16000);
  CHECK(pass.size() == 16000);
  CHECK(CentreRms(pass) == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(0.02));
  const auto stop = Resample(Tone(11000.0, 48000, 1.0), 48000, 16000);
  CHECK(20.0 * std::log10(CentreRms(stop) / (0.5 / std::sqrt(2.0))) < -60.0);
  const auto up = Resample(Tone(440.0, 22050, 0.5), 22050, 16000);
  CHECK(up.size() == static_cast<size_t>(std::floor(11025.0 * 16000 / 22050)));
  CHECK(Resample(Tone(440.0, 16000, 0.1), 16000, 16000) == Tone(440.0, 16000, 0.1));
}

TEST_CASE("downmix averages channels") {
  Waveform w;
  w.channels = 2;
  w.samples = {1.0f, 0.0f, 0.5f, -0.5f};
  Waveform m = Downmix(w);
  CHECK(m.channels == 1);
  REQUIRE(m.samples.size() == 2);
  CHECK(m.samples[0] == doctest::Approx(0.5));
  CHECK(m.samples[1] == doctest::Approx(0.0));
}

TEST_CASE("standardize normalizes loudness and respects the peak ceiling") {
  Waveform w;
  w.sample_rate_hz = 48000;
  w.channels = 1;
  w.samples = Tone(500.0, 48000, 1.0, 0.01);
  StandardizeResult r = StandardizeAudio(w);
  CHECK(r.audio.sample_rate_hz == 16000);
  CHECK(r.audio.channels == 1);
  CHECK(RmsDbfs(r.audio.samples) == doctest::Approx(-20.0).epsilon(0.01));
  CHECK_FALSE(r.peak_limited);

  // A sparse click train needs so much gain that the ceiling binds.
  Waveform clicks;
  clicks.samples.assign(16000, 0.0f);
  for (size_t i = 0; i < clicks.samples.size(); i += 4000) clicks.samples[i] = 0.05f;
  StandardizeResult c = StandardizeAudio(clicks);
  CHECK(c.peak_limited);
  CHECK(PeakDbfs(c.audio.samples) == doctest::Approx(-1.0).epsilon(1e-3));

  Waveform zero;
  zero.samples.assign(1600, 0.0f);
  StandardizeResult z = StandardizeAudio(zero);
  CHECK(z.silent);
  CHECK(z.audio.samples == zero.samples);
}

TEST_CASE("length mismatch filter") {
  std::vector<SegmentRecord> recs = {testing::MakeRecord("a", "x", 0.0, 5.0, "ab cd"),
                                     testing::MakeRecord("b", "x", 0.0, 2.0, "abcd"),
                                     testing::MakeRecord("c", "x", 0.0, 1.0, "")};
  LengthFilterResult r = LengthMismatchFilter(recs, 2.0);
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept[0].segment_id == "b");
  CHECK(r.dropped.size() == 2);
}

TEST_CASE("wav write and decode round trip") {
  TempDir tmp;
  Waveform w;
  w.sample_rate_hz = 48000;
  w.channels = 2;
  const auto mono = Tone(300.0, 48000, 0.25);
  for (float s : mono) {
    w.samples.push_back(s);
    w.samples.push_back(-s);
  }
  WriteWav(tmp / "s.wav", w);
  Waveform back = DecodeAudioFile(tmp / "s.wav");
  CHECK(back.sample_rate_hz == 48000);
  CHECK(back.channels == 2);
  REQUIRE(back.samples.size() == w.samples.size());
  double err = 0.0;
  for (size_t i = 0; i < w.samples.size(); ++i)
    err = std::max(err, static_cast<double>(std::abs(back.samples[i] - w.samples[i])));
  CHECK(err < 1e-4);
  CHECK_THROWS_AS(DecodeAudioFile(tmp / "missing.wav"), Error);
}

TEST_CASE("opus package round trip keeps length and content") {
  const auto in = Tone(440.0, 16000, 1.3, 0.3);
  const auto blob = PackageOpus(in);
  CHECK(blob.size() < in.size() * 2);
  Waveform out = UnpackOpus(blob);
  CHECK(out.sample_rate_hz == 16000);
  CHECK(out.channels == 1);
  REQUIRE(out.samples.size() == in.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < in.size(); ++i) {
    num += (static_cast<double>(out.samples[i]) - in[i]) * (out.samples[i] - in[i]);
    den += static_cast<double>(in[i]) * in[i];
  }
  CHECK(10.0 * std::log10(den / num) > 10.0);

  TempDir tmp;
  OpusShardWriter writer;
  writer.Add("seg1", "{\"segment_id\":\"seg1\"}", blob);
  writer.Add("seg2", "{\"segment_id\":\"seg2\"}", PackageOpus(Tone(200.0, 16000, 0.5)));
  writer.Write(tmp / "shard.scop");
  const auto entries = ReadOpusShard(tmp / "shard.scop");
  REQUIRE(entries.size() == 2);
  CHECK(entries.at("seg1").blob == blob);
  CHECK(entries.at("seg2").manifest_line == "{\"segment_id\":\"seg2\"}");
}

}  // TEST_SUITE
