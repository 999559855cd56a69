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

#include "speechcurate/audio.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "speechcurate/resample.h"
#include "speechcurate/util.h"

namespace speechcurate {

std::span<const float> Waveform::Slice(double start_s, double end_s) const {
  if (channels != 1) throw std::logic_error("Waveform::Slice needs mono audio");
  const int64_t n = static_cast<int64_t>(samples.size());
  int64_t a = std::llround(start_s * sample_rate_hz);
  int64_t b = std::llround(end_s * sample_rate_hz);
  a = std::clamp<int64_t>(a, 0, n);
  b = std::clamp<int64_t>(b, a, n);
  return std::span<const float>(samples.data() + a, static_cast<size_t>(b - a));
}

double RmsDbfs(std::span<const float> samples) {
  if (samples.empty()) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (float s : samples) acc += static_cast<double>(s) * s;
  const double ms = acc / static_cast<double>(samples.size());
  if (ms <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ms);
}

double PeakDbfs(std::span<const float> samples) {
  float peak = 0.0f;
  for (float s : samples) peak = std::max(peak, std::abs(s));
  if (peak <= 0.0f) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(static_cast<double>(peak));
}

Waveform Downmix(const Waveform& input) {
  if (input.channels <= 0) throw ValidationError("waveform has no channels");
  Waveform out;
  out.sample_rate_hz = input.sample_rate_hz;
  out.channels = 1;
  if (input.channels == 1) {
    out.samples = input.samples;
    return out;
  }
  const size_t frames = input.frames();
  const size_t ch = static_cast<size_t>(input.channels);
  out.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < ch; ++c) acc += input.samples[i * ch + c];
    out.samples[i] = static_cast<float>(acc / static_cast<double>(ch));
  }
  return out;
}

StandardizeResult StandardizeAudio(const Waveform& input,
                                   const LoudnessSpec& spec) {
  if (spec.peak_ceiling_dbfs > 0.0)
    throw ConfigError("peak_ceiling_dbfs must be <= 0");
  if (input.frames() == 0) throw ValidationError("cannot standardize empty audio");
  if (input.sample_rate_hz <= 0) throw ValidationError("invalid sample rate");

  Waveform mono = Downmix(input);
  StandardizeResult result;
  result.audio.sample_rate_hz = kStandardSampleRate;
  result.audio.channels = 1;
  result.audio.samples =
      Resample(mono.samples, mono.sample_rate_hz, kStandardSampleRate);

  const double rms = RmsDbfs(result.audio.samples);
  if (!std::isfinite(rms)) {
    result.silent = true;
    return result;
  }
  double gain_db = spec.target_rms_dbfs - rms;
  const double peak = PeakDbfs(result.audio.samples);
  if (peak + gain_db > spec.peak_ceiling_dbfs) {
    gain_db = spec.peak_ceiling_dbfs - peak;
    result.peak_limited = true;
  }
  const double gain = std::pow(10.0, gain_db / 20.0);
  const float ceiling =
      static_cast<float>(std::pow(10.0, spec.peak_ceiling_dbfs / 20.0));
  for (float& s : result.audio.samples)
    s = std::clamp(static_cast<float>(s * gain), -ceiling, ceiling);
  result.gain_db = gain_db;
  return result;
}

LengthFilterResult LengthMismatchFilter(std::vector<SegmentRecord> records,
                                        double min_chars_per_s) {
  LengthFilterResult out;
  for (auto& r : records) {
    const double dur = r.duration_s();
    const double chars = static_cast<double>(CountNonSpaceCodepoints(r.text));
    const double rate = dur > 0.0 ? chars / dur : 0.0;
    if (rate < min_chars_per_s) {
      out.dropped.push_back(std::move(r));
    } else {
      out.kept.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace speechcurate
