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

#ifndef SPEECHCURATE_SYNTH_H_
#define SPEECHCURATE_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speechcurate/audio.h"
#include "speechcurate/bench_builder.h"
#include "speechcurate/corpus.h"
#include "speechcurate/segmentation.h"
#include "speechcurate/util.h"

namespace speechcurate {

// Synthetic recordings with a known speech/silence layout, used by tests
// and the `synth` subcommand.

struct PlantedLayout {
  double duration_s = 0.0;
  std::vector<SpeechRegion> speech;  // sorted, non-overlapping
};

struct LayoutOptions {
  double min_burst_s = 1.5;
  double max_burst_s = 12.0;
  double min_gap_s = 0.2;
  double max_gap_s = 2.5;
  double lead_s = 1.0;  // silence before the first burst
};

PlantedLayout RandomLayout(Rng& rng, double duration_s, const LayoutOptions& options = {});

// Speech bursts are band-limited noise with a slow amplitude envelope at
// about `speech_dbfs` RMS; silences carry white noise at `noise_dbfs`.
// Every channel gets the same signal.
Waveform RenderLayout(const PlantedLayout& layout, int sample_rate_hz, int channels,
                      double speech_dbfs, double noise_dbfs, Rng& rng);

// Fraction of [start_s, end_s) covered by planted speech.
double PlantedRatio(const PlantedLayout& layout, double start_s, double end_s);

struct SynthDataset {
  std::string name;
  std::optional<std::string> sub_split;
  double noise_dbfs = -60.0;
};

struct SynthCorpusOptions {
  std::filesystem::path out_dir;
  int assets = 6;
  uint64_t seed = 1;
  double min_asset_s = 40.0;
  double max_asset_s = 80.0;
  std::vector<SynthDataset> datasets = {{"SynthRead", std::nullopt, -65.0},
                                        {"SynthPeople", "Clean", -55.0},
                                        {"SynthWild", std::nullopt, -42.0}};
  // Share of speech bursts the scoring ASR mishears.
  double mismatch_fraction = 0.25;
  std::string reference_model = "whisper-large-v3";
  std::string scoring_model = "whisper-small";
};

struct SynthCorpus {
  std::filesystem::path assets_path;      // raw asset table
  std::filesystem::path stub_words_path;  // stub ASR sidecar
  std::filesystem::path config_path;      // ready-to-run pipeline config
  std::map<std::string, PlantedLayout> layouts;
};

// Writes raw recordings (a mix of 16 kHz mono and 48 kHz stereo WAV), the
// asset table, the stub-word sidecar and a pipeline config into out_dir.
SynthCorpus WriteSynthCorpus(const SynthCorpusOptions& options);

// In-memory stand-ins for benchmark datasets: `per_dataset` records each,
// with speakers and (for expressive sets) emotion tags.
std::map<std::string, DatasetManifest> SynthBenchmarkManifests(
    const BenchmarkConfig& config, int64_t per_dataset, uint64_t seed,
    int speakers = 12);

// Manifests for the reference benchmark config plus a stub-word sidecar in
// which most AMI-SDM segments transcribe exactly, and a config that builds
// the benchmark from them.
std::filesystem::path WriteSynthBenchmarkInputs(const std::filesystem::path& out_dir,
                                                int64_t per_dataset, uint64_t seed);

}  // namespace speechcurate

#endif  // SPEECHCURATE_SYNTH_H_
