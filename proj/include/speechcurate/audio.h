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

#ifndef SPEECHCURATE_AUDIO_H_
#define SPEECHCURATE_AUDIO_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "speechcurate/corpus.h"

namespace speechcurate {

constexpr int kStandardSampleRate = 16000;

/// Interleaved float PCM, full scale = 1.0.
struct Waveform {
  int sample_rate_hz = kStandardSampleRate;
  int channels = 1;
  std::vector<float> samples;

  size_t frames() const {
    return channels > 0 ? samples.size() / static_cast<size_t>(channels) : 0;
  }
  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(frames()) / sample_rate_hz
               : 0.0;
  }
  // Mono slice [start_s, end_s), clamped to the signal. Requires channels == 1.
  std::span<const float> Slice(double start_s, double end_s) const;
};

struct LoudnessSpec {
  double target_rms_dbfs = -20.0;
  double peak_ceiling_dbfs = -1.0;  // must be <= 0
};

// 20 log10(rms); -inf for digital silence.
double RmsDbfs(std::span<const float> samples);
double PeakDbfs(std::span<const float> samples);

Waveform Downmix(const Waveform& input);

struct StandardizeResult {
  Waveform audio;      // 16 kHz mono
  bool silent = false; // all-zero input, returned without gain
  bool peak_limited = false;
  double gain_db = 0.0;
};

// Channel-average downmix, resample to 16 kHz, then RMS normalization to
// the target. If that gain would push the peak over the ceiling, the gain
// is reduced so the peak sits exactly on it.
StandardizeResult StandardizeAudio(const Waveform& input,
                                   const LoudnessSpec& spec = {});

struct LengthFilterResult {
  std::vector<SegmentRecord> kept;
  std::vector<SegmentRecord> dropped;
};

// Drops records whose non-space character count per second of audio is
// below `min_chars_per_s`.
LengthFilterResult LengthMismatchFilter(std::vector<SegmentRecord> records,
                                        double min_chars_per_s = 2.0);

}  // namespace speechcurate

#endif  // SPEECHCURATE_AUDIO_H_
