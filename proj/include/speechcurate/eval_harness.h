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

#ifndef SPEECHCURATE_EVAL_HARNESS_H_
#define SPEECHCURATE_EVAL_HARNESS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "speechcurate/bench_builder.h"
#include "speechcurate/scorer_client.h"

namespace speechcurate {

struct GenerationRecord {
  std::string pair_id;
  std::string model_name;
  std::string uri;
};

// Samples with WER above this ratio are treated as ASR hallucinations and
// left out of the WER aggregate.
inline constexpr double kHallucinationWer = 1.0;

struct SampleResult {
  std::string pair_id;
  Category category = Category::kClean;
  bool missing = false;  // no generation for the pair
  std::optional<double> wer;
  bool wer_excluded = false;
  std::optional<double> sim;
  bool sim_invalid = false;
  std::optional<double> dnsmos;
  std::string error;  // last adapter failure, if any
};

struct ObjectiveResult {
  std::string model_name;
  std::vector<SampleResult> samples;  // benchmark order
  int64_t missing = 0;
};

struct EvalOptions {
  std::string asr_model = "whisper-large-v3";
  bool adapter_normalizer = false;
};

// One sample per benchmark pair; pairs without a generation are marked
// missing and counted.
ObjectiveResult PrepareResult(const std::vector<GenerationRecord>& generations,
                              const std::vector<PromptPair>& benchmark);

// The Eval* passes fill one metric on `result` in place.
void EvalWer(ObjectiveResult* result, const std::vector<GenerationRecord>& generations,
             const std::vector<PromptPair>& benchmark, ScorerClient& asr,
             const EvalOptions& options = {});
void EvalSim(ObjectiveResult* result, const std::vector<GenerationRecord>& generations,
             const std::vector<PromptPair>& benchmark, ScorerClient& embedder);
// Throws ProtocolError on a score outside [1, 5].
void EvalDnsmos(ObjectiveResult* result,
                const std::vector<GenerationRecord>& generations, ScorerClient& dnsmos);

// All three metrics.
ObjectiveResult EvaluateModel(const std::vector<GenerationRecord>& generations,
                              const std::vector<PromptPair>& benchmark,
                              ScorerClient& adapter, const EvalOptions& options = {});

double CosineSimilarity(const std::vector<float>& a, const std::vector<float>& b);

enum class EvalMetric { kWer, kSim, kDnsmos };
const char* EvalMetricName(EvalMetric metric);

struct MetricAggregate {
  std::optional<double> mean;  // absent when no sample contributes
  int64_t count = 0;
  int64_t excluded = 0;
};

struct CategoryTable {
  EvalMetric metric = EvalMetric::kWer;
  std::map<Category, MetricAggregate> categories;
  // Pooled over every contributing sample, not a mean of category means.
  MetricAggregate overall;
};

// WER is reported in percent, SIM and DNSMOS in their native units.
CategoryTable AggregateByCategory(const ObjectiveResult& result, EvalMetric metric);

struct MetricColumn {
  std::string name;
  bool lower_is_better = false;
  std::vector<std::optional<double>> values;  // one per model
};

struct ModelRanking {
  std::vector<std::string> models;
  std::vector<std::vector<double>> ranks;  // [metric][model], 1 = best
  std::vector<double> average_rank;
};

// Ranks models per metric with ties sharing the mean rank, then averages the
// ranks across metrics. Throws ValidationError on a missing value.
ModelRanking RankModels(const std::vector<std::string>& models,
                        const std::vector<MetricColumn>& metrics);

// Generation directory: <dir>/<pair_id>.<ext> plus an optional run manifest
// "run.json" {"model_name", "benchmark_hash"}.
std::vector<GenerationRecord> ScanGenerations(const std::filesystem::path& dir,
                                              std::string* model_name = nullptr);

std::string EncodeSampleResult(const SampleResult& s, const std::string& model);
SampleResult DecodeSampleResult(std::string_view line, size_t line_number,
                                std::string* model);

}  // namespace speechcurate

#endif  // SPEECHCURATE_EVAL_HARNESS_H_
