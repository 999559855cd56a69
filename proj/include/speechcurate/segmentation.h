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

#ifndef SPEECHCURATE_SEGMENTATION_H_
#define SPEECHCURATE_SEGMENTATION_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "speechcurate/corpus.h"

namespace speechcurate {

struct SpeechRegion {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }
  bool operator==(const SpeechRegion&) const = default;
};

struct SegmenterConfig {
  double min_segment_s = 3.0;
  double max_segment_s = 30.0;
  double merge_gap_s = 0.5;
  int frame_ms = 25;
  int hop_ms = 10;
  int hangover_ms = 200;
  int min_region_ms = 250;
  double energy_margin_db = 6.0;
  double abs_floor_dbfs = -45.0;
  // The adaptive noise floor is capped here, so recordings with no quiet
  // frames (a tone from start to end) still register as active.
  double max_noise_floor_dbfs = -35.0;

  void Validate() const;
};

// Reference energy VAD. A frame is speech when its energy exceeds
// max(noise_floor + energy_margin_db, abs_floor_dbfs), where noise_floor is
// the 10th-percentile frame energy (capped at max_noise_floor_dbfs). Frame
// i stands for the hop-wide interval centred on its analysis window.
// Regions are extended by the hangover, regions shorter than min_region_ms
// dropped, and bounds rounded to milliseconds.
std::vector<SpeechRegion> DetectSpeechRegions(std::span<const float> samples,
                                              int sample_rate_hz,
                                              const SegmenterConfig& config = {});

// Frame-level activity without hangover or minimum length. Speech ratio is
// measured against these.
std::vector<SpeechRegion> DetectSpeechFrames(std::span<const float> samples,
                                             int sample_rate_hz,
                                             const SegmenterConfig& config = {});

// Sorts and merges overlapping (start, end) pairs from an external VAD.
// Throws ValidationError for a pair with start >= end or non-finite bounds.
std::vector<SpeechRegion> ImportExternalVad(
    std::vector<std::pair<double, double>> turns);

// Cuts regions into segments of [min_segment_s, max_segment_s]:
//   * regions closer than merge_gap_s are merged into one group;
//   * a group longer than max_segment_s is split at its longest internal
//     gap, recursively; a single region is cut on max_segment_s boundaries;
//   * pieces shorter than min_segment_s are dropped.
// Segment ids are "<asset_id>_<index>" with a zero-padded index.
std::vector<SegmentRecord> SegmentsFromRegions(
    const std::vector<SpeechRegion>& regions, const SegmenterConfig& config,
    const std::string& asset_id);

// Fraction of the segment covered by `regions`, which must be sorted and
// non-overlapping.
double SpeechRatio(double start_s, double end_s,
                   const std::vector<SpeechRegion>& regions);
inline double SpeechRatio(const SegmentRecord& segment,
                          const std::vector<SpeechRegion>& regions) {
  return SpeechRatio(segment.start_s, segment.end_s, regions);
}

// Per-frame energies in dBFS, used by the VAD and the stub quality proxy.
std::vector<double> FrameEnergiesDb(std::span<const float> samples,
                                    int sample_rate_hz, int frame_ms,
                                    int hop_ms);

}  // namespace speechcurate

#endif  // SPEECHCURATE_SEGMENTATION_H_
