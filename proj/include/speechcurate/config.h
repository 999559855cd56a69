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

#ifndef SPEECHCURATE_CONFIG_H_
#define SPEECHCURATE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "speechcurate/audio.h"
#include "speechcurate/bench_builder.h"
#include "speechcurate/eval_harness.h"
#include "speechcurate/quality_filter.h"
#include "speechcurate/segmentation.h"

namespace speechcurate {

struct AdapterConfig {
  std::string url;          // scorer service base url
  bool stub = true;         // use the built-in stand-ins
  std::string stub_words;   // sidecar for the stub ASR
  double timeout_s = 120.0;
  int max_in_flight = 4;
};

struct IngestOptions {
  std::string input;  // asset table (JSON Lines) of raw recordings
  LoudnessSpec loudness;
  bool separate = true;
};

struct SegmentOptions {
  SegmenterConfig segmenter;
  std::string vad = "builtin";  // or "adapter"
  bool diarize = true;
  std::string asr_model = "whisper-large-v3";
  double min_chars_per_s = 2.0;
  bool package_opus = true;
};

struct BuildEvalOptions {
  std::map<std::string, std::string> manifests;  // dataset -> manifest path
  std::string output;
  bool use_reference = true;  // twelve-dataset reference layout
  std::vector<CategoryConfig> categories;
  int prompts_per_dataset = 500;
  std::vector<std::string> zero_wer_datasets;  // added to the reference set
};

struct EvaluateOptions {
  std::string benchmark;
  std::vector<std::string> generations;  // one directory per model
  EvalOptions eval;
  std::string output;
};

struct MosOptions {
  std::string input;
  std::string scale = "cmos";
  std::string output;
};

struct ReportOptions {
  int histogram_bins = 40;
};

// Runtime configuration. Loaded from a JSON document whose keys mirror the
// fields below; unknown keys are errors. Relative paths resolve against the
// config file's directory.
struct PipelineConfig {
  std::string work_dir = "work";
  int shards = 1;
  int workers = 0;  // 0 = hardware concurrency
  uint64_t seed = 0;
  int max_attempts = 3;
  std::vector<std::string> stages = {"ingest", "segment", "score", "filter", "report"};
  AdapterConfig adapters;
  IngestOptions ingest;
  SegmentOptions segment;
  ScoreOptions score;
  FilterPolicy filter;
  BuildEvalOptions build_eval;
  EvaluateOptions evaluate;
  MosOptions aggregate_mos;
  ReportOptions report;
  // Test hook: terminate the process after this many shards complete.
  int crash_after_shards = 0;

  void Validate() const;
  int EffectiveWorkers() const;
  // Canonical JSON of the options that affect a stage's output; feeds the
  // shard done-markers.
  std::string StageFingerprint(const std::string& stage) const;
};

const std::vector<std::string>& KnownStages();

PipelineConfig ParseConfig(const std::string& json_text,
                           const std::filesystem::path& base_dir = {});
PipelineConfig LoadConfig(const std::filesystem::path& path);

}  // namespace speechcurate

#endif  // SPEECHCURATE_CONFIG_H_
