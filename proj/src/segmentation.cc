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

#include "speechcurate/segmentation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "speechcurate/util.h"

namespace speechcurate {
namespace {

struct MsRegion {
  int64_t start;
  int64_t end;
};

std::vector<SpeechRegion> RunVad(std::span<const float> samples,
                                 int sample_rate_hz, const SegmenterConfig& c,
                                 int hangover_ms, int min_region_ms) {
  c.Validate();
  if (sample_rate_hz <= 0) throw ValidationError("invalid sample rate");
  std::vector<double> energy =
      FrameEnergiesDb(samples, sample_rate_hz, c.frame_ms, c.hop_ms);
  if (energy.empty()) return {};

  std::vector<double> sorted = energy;
  const size_t k = static_cast<size_t>(0.1 * static_cast<double>(sorted.size() - 1));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k),
                   sorted.end());
  const double noise_floor = std::min(sorted[k], c.max_noise_floor_dbfs);
  const double threshold = std::max(noise_floor + c.energy_margin_db, c.abs_floor_dbfs);

  // Frame i covers [i*hop + (frame-hop)/2, +hop) in time; the first and
  // last frames are stretched to the signal edges.
  const double total_ms = 1000.0 * static_cast<double>(samples.size()) / sample_rate_hz;
  const double offset_ms = (c.frame_ms - c.hop_ms) / 2.0;
  auto frame_start = [&](size_t i) {
    return i == 0 ? 0.0 : static_cast<double>(i) * c.hop_ms + offset_ms;
  };
  auto frame_end = [&](size_t i) {
    return i + 1 == energy.size() ? total_ms
                                  : static_cast<double>(i + 1) * c.hop_ms + offset_ms;
  };

  std::vector<MsRegion> runs;
  for (size_t i = 0; i < energy.size();) {
    if (energy[i] <= threshold) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < energy.size() && energy[j + 1] > threshold) ++j;
    const int64_t s = std::llround(frame_start(i));
    const int64_t e = std::min<int64_t>(std::llround(frame_end(j) + hangover_ms),
                                        std::llround(total_ms));
    if (!runs.empty() && s <= runs.back().end) {
      runs.back().end = std::max(runs.back().end, e);
    } else {
      runs.push_back({s, e});
    }
    i = j + 1;
  }

  std::vector<SpeechRegion> out;
  for (const auto& r : runs) {
    if (r.end - r.start < min_region_ms || r.end <= r.start) continue;
    out.push_back({r.start / 1000.0, r.end / 1000.0});
  }
  return out;
}

void SplitGroup(const std::vector<MsRegion>& group, size_t lo, size_t hi,
                int64_t max_ms, std::vector<MsRegion>* out) {
  const int64_t start = group[lo].start;
  const int64_t end = group[hi].end;
  if (end - start <= max_ms) {
    out->push_back({start, end});
    return;
  }
  if (hi > lo) {
    size_t cut = lo;
    int64_t best = -1;
    for (size_t i = lo; i < hi; ++i) {
      const int64_t gap = group[i + 1].start - group[i].end;
      if (gap > best) {
        best = gap;
        cut = i;
      }
    }
    SplitGroup(group, lo, cut, max_ms, out);
    SplitGroup(group, cut + 1, hi, max_ms, out);
    return;
  }
  for (int64_t s = start; s < end; s += max_ms) out->push_back({s, std::min(end, s + max_ms)});
}

}  // namespace

void SegmenterConfig::Validate() const {
  if (!(min_segment_s < max_segment_s))
    throw ConfigError("segmenter: min_segment_s must be < max_segment_s");
  if (frame_ms < hop_ms || hop_ms <= 0)
    throw ConfigError("segmenter: requires frame_ms >= hop_ms > 0");
  if (merge_gap_s < 0.0 || hangover_ms < 0 || min_region_ms < 0)
    throw ConfigError("segmenter: negative duration parameter");
}

std::vector<double> FrameEnergiesDb(std::span<const float> samples,
                                    int sample_rate_hz, int frame_ms,
                                    int hop_ms) {
  const size_t frame = static_cast<size_t>(sample_rate_hz) * frame_ms / 1000;
  const size_t hop = static_cast<size_t>(sample_rate_hz) * hop_ms / 1000;
  std::vector<double> out;
  if (frame == 0 || hop == 0 || samples.size() < frame) return out;
  const size_t n = 1 + (samples.size() - frame) / hop;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const float* p = samples.data() + i * hop;
    for (size_t j = 0; j < frame; ++j) acc += static_cast<double>(p[j]) * p[j];
    out.push_back(std::max(-120.0, 10.0 * std::log10(acc / frame + 1e-12)));
  }
  return out;
}

std::vector<SpeechRegion> DetectSpeechRegions(std::span<const float> samples,
                                              int sample_rate_hz,
                                              const SegmenterConfig& config) {
  return RunVad(samples, sample_rate_hz, config, config.hangover_ms,
                config.min_region_ms);
}

std::vector<SpeechRegion> DetectSpeechFrames(std::span<const float> samples,
                                             int sample_rate_hz,
                                             const SegmenterConfig& config) {
  return RunVad(samples, sample_rate_hz, config, 0, 0);
}

std::vector<SpeechRegion> ImportExternalVad(
    std::vector<std::pair<double, double>> turns) {
  for (const auto& [s, e] : turns) {
    if (!std::isfinite(s) || !std::isfinite(e))
      throw ValidationError("external VAD: non-finite bound");
    if (!(s < e))
      throw ValidationError("external VAD: start " + FormatFixed(s, 3) +
                            " >= end " + FormatFixed(e, 3));
  }
  std::sort(turns.begin(), turns.end());
  std::vector<SpeechRegion> out;
  for (const auto& [s, e] : turns) {
    if (!out.empty() && s <= out.back().end_s) {
      out.back().end_s = std::max(out.back().end_s, e);
    } else {
      out.push_back({s, e});
    }
  }
  return out;
}

std::vector<SegmentRecord> SegmentsFromRegions(
    const std::vector<SpeechRegion>& regions, const SegmenterConfig& config,
    const std::string& asset_id) {
  config.Validate();
  const int64_t merge_gap = ToMillis(config.merge_gap_s);
  const int64_t min_ms = ToMillis(config.min_segment_s);
  const int64_t max_ms = ToMillis(config.max_segment_s);

  std::vector<MsRegion> ms;
  ms.reserve(regions.size());
  for (const auto& r : regions) ms.push_back({ToMillis(r.start_s), ToMillis(r.end_s)});
  std::sort(ms.begin(), ms.end(),
            [](const MsRegion& a, const MsRegion& b) { return a.start < b.start; });

  std::vector<MsRegion> pieces;
  size_t i = 0;
  while (i < ms.size()) {
    std::vector<MsRegion> group{ms[i]};
    size_t j = i + 1;
    while (j < ms.size() && ms[j].start - group.back().end < merge_gap) {
      if (ms[j].start < group.back().end) {
        group.back().end = std::max(group.back().end, ms[j].end);
      } else {
        group.push_back(ms[j]);
      }
      ++j;
    }
    SplitGroup(group, 0, group.size() - 1, max_ms, &pieces);
    i = j;
  }

  std::vector<SegmentRecord> out;
  for (const auto& p : pieces) {
    if (p.end - p.start < min_ms) continue;
    SegmentRecord r;
    char idx[16];
    std::snprintf(idx, sizeof(idx), "_%05zu", out.size());
    r.segment_id = asset_id + idx;
    r.asset_id = asset_id;
    r.start_s = p.start / 1000.0;
    r.end_s = p.end / 1000.0;
    out.push_back(std::move(r));
  }
  return out;
}

double SpeechRatio(double start_s, double end_s,
                   const std::vector<SpeechRegion>& regions) {
  const double dur = end_s - start_s;
  if (!(dur > 0.0)) return 0.0;
  double covered = 0.0;
  auto it = std::lower_bound(regions.begin(), regions.end(), start_s,
                             [](const SpeechRegion& r, double t) { return r.end_s <= t; });
  for (; it != regions.end() && it->start_s < end_s; ++it) {
    const double a = std::max(start_s, it->start_s);
    const double b = std::min(end_s, it->end_s);
    if (b > a) covered += b - a;
  }
  return std::clamp(covered / dur, 0.0, 1.0);
}

}  // namespace speechcurate
