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

#ifndef SPEECHCURATE_BENCH_BUILDER_H_
#define SPEECHCURATE_BENCH_BUILDER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "speechcurate/corpus.h"
#include "speechcurate/scorer_client.h"

namespace speechcurate {

enum class Category { kClean, kNoisy, kWild, kExpressive };
const char* CategoryName(Category category);
Category ParseCategory(const std::string& name);

struct CategoryConfig {
  Category category = Category::kClean;
  std::vector<std::string> datasets;
  int prompts_per_dataset = 500;
  // First key present on every record defines the strata. "speaker_id" is
  // the record field, anything else a tag.
  std::vector<std::string> strata_keys = {"speaker_id", "emotion", "dialect", "style"};
};

struct BenchmarkConfig {
  std::vector<CategoryConfig> categories;
  // Datasets whose records must transcribe with zero WER to be eligible.
  std::set<std::string> zero_wer_datasets;
  std::string asr_model = "whisper-large-v3";

  // Twelve datasets in four categories, 500 prompts each; AMI-SDM gets the
  // zero-WER prefilter.
  static BenchmarkConfig Reference();
  // Canonical text used for the config hash.
  std::string Canonical() const;
};

struct PromptPair {
  std::string pair_id;
  Category category = Category::kClean;
  std::string source_dataset;
  std::string prompt_segment_id;
  std::string prompt_text;
  std::string target_text;
  std::string target_source_segment_id;
  // Where the prompt audio lives.
  std::string prompt_uri;
  double prompt_start_s = 0.0;
  double prompt_end_s = 0.0;
  std::optional<std::string> speaker_id;

  bool operator==(const PromptPair&) const = default;
};

struct PrefilterDrop {
  std::string segment_id;
  std::string reason;
};

// Keeps records whose transcript matches the ASR output exactly after
// normalization. Adapter failures drop the record with the reason logged.
DatasetManifest ZeroWerPrefilter(const DatasetManifest& manifest,
                                 ScorerClient& asr, const std::string& model,
                                 std::vector<PrefilterDrop>* drops = nullptr);

// Value of a stratum key on a record, if present.
std::optional<std::string> StratumValue(const SegmentRecord& record,
                                        const std::string& key);

// Equal allocation of n across strata given their sizes. Quotas differ by at
// most one unless a stratum runs out of records; remainders go to the
// largest strata first, ties by name.
std::map<std::string, int64_t> StratumQuotas(const std::map<std::string, int64_t>& sizes,
                                             int64_t n);

std::vector<SegmentRecord> StratifiedSample(const std::vector<SegmentRecord>& records,
                                            int64_t n,
                                            const std::vector<std::string>& strata_keys,
                                            uint64_t seed,
                                            std::string* stratum_key = nullptr);

// Pairs every prompt with the text of a different segment from the same
// dataset, drawn in seeded random order. Targets are used at most once and
// texts equal to the prompt's are skipped while supply lasts.
std::vector<PromptPair> PairPrompts(const std::vector<SegmentRecord>& prompts,
                                    const DatasetManifest& dataset, uint64_t seed,
                                    Category category);

struct LayoutRow {
  Category category = Category::kClean;
  std::string dataset;
  int64_t eligible = 0;
  int64_t pairs = 0;
  std::string stratum_key;  // empty for plain uniform sampling
  std::map<std::string, int64_t> quotas;
  std::map<std::string, int64_t> supply;  // eligible records per stratum
};

struct BenchmarkLayout {
  std::vector<LayoutRow> rows;
  std::map<std::string, int64_t> category_totals;
  int64_t total = 0;
  uint64_t seed = 0;
  std::string config_hash;
};

struct Benchmark {
  std::vector<PromptPair> pairs;
  BenchmarkLayout layout;
};

// `manifests` are keyed by dataset name. `asr` is only needed when a
// dataset in zero_wer_datasets is configured. Throws ValidationError naming
// any dataset with too few eligible records.
Benchmark BuildBenchmark(const BenchmarkConfig& config,
                         const std::map<std::string, DatasetManifest>& manifests,
                         uint64_t seed, ScorerClient* asr = nullptr);

std::string EncodePromptPair(const PromptPair& pair);
PromptPair DecodePromptPair(std::string_view line, size_t line_number);
void WriteBenchmark(const Benchmark& bench, const std::filesystem::path& path);
std::vector<PromptPair> ReadBenchmark(const std::filesystem::path& path);
// "<bench>.layout.json" next to the benchmark file.
std::filesystem::path LayoutPathFor(const std::filesystem::path& bench_path);

}  // namespace speechcurate

#endif  // SPEECHCURATE_BENCH_BUILDER_H_
