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

#ifndef SPEECHCURATE_QUALITY_FILTER_H_
#define SPEECHCURATE_QUALITY_FILTER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "speechcurate/corpus.h"
#include "speechcurate/scorer_client.h"

namespace speechcurate {

// ------------------------------------------------------------- scoring

struct ScoreOptions {
  // Re-score records that already carry scores.
  bool force = false;
  std::string asr_model = "whisper-small";
  // Normalize both sides through the adapter's /normalize endpoint instead
  // of the built-in normalizer.
  bool adapter_normalizer = false;
};

struct ScoreSummary {
  int64_t scored = 0;
  int64_t skipped = 0;  // already scored
  int64_t failed = 0;   // score_error recorded
};

// Attaches (dnsmos, wer, speech_ratio) to every record. WER is measured
// against the record's own transcript; speech ratio against one VAD pass
// per asset. A segment whose adapter call fails keeps no scores and gets
// score_error instead; the remaining segments are still scored.
ScoreSummary ScoreSegments(DatasetManifest* manifest, ScorerClient& adapter,
                           const ScoreOptions& options = {});

// ------------------------------------------------------------- filters

// Linear-interpolation percentile, p in [0, 100]. Throws on empty input.
double ComputePercentile(std::vector<double> values, double p);

enum class FilterMode { kNone, kWer, kDnsmos, kVad, kCombined };
const char* FilterModeName(FilterMode mode);
FilterMode ParseFilterMode(const std::string& name);

struct AbsoluteOverrides {
  std::optional<double> dnsmos;
  std::optional<double> wer;
  std::optional<double> speech_ratio;

  std::optional<double> For(Metric metric) const;
  // 2.24 / 0.35 / 0.79.
  static AbsoluteOverrides Reference();
};

struct FilterPolicy {
  FilterMode mode = FilterMode::kCombined;
  double removal_percentile = 15.0;
  AbsoluteOverrides overrides;

  void Validate() const;
  // Stable identifier written into audit files, e.g. "combined@p15".
  std::string Id() const;
};

struct RankedSegment {
  std::string segment_id;
  // Quality ranks in Metric order (dnsmos, wer, speech_ratio); 1 = worst.
  std::array<double, 3> ranks{};
  double combined_score = 0.0;
};

struct FilterAuditRow {
  std::string segment_id;
  std::optional<std::array<double, 3>> ranks;
  std::optional<double> combined_score;
  std::optional<double> value;  // metric value for per-metric modes
  double cutoff = 0.0;
  bool keep = true;
  std::string policy;
};

struct FilterResult {
  DatasetManifest kept;
  DatasetManifest dropped;
  double threshold = 0.0;
  std::vector<RankedSegment> ranked;  // combined mode only
  std::vector<FilterAuditRow> audit;
};

// Quality ranks 1..n, 1 for the worst value, ties sharing the mean of their
// positions.
std::vector<double> QualityRanks(const std::vector<double>& values,
                                 bool higher_is_better);

// Drops dnsmos / speech_ratio below the threshold and wer above it; values
// equal to the threshold are kept. The threshold is the override when set,
// otherwise the p-th percentile (the (100-p)-th for wer).
FilterResult PerMetricFilter(const DatasetManifest& manifest, Metric metric,
                             const FilterPolicy& policy);

// Averages the three quality ranks and drops segments whose combined score
// is below the p-th percentile of all combined scores.
FilterResult CombinedRankFilter(const DatasetManifest& manifest,
                                const FilterPolicy& policy);

// Dispatches on policy.mode.
FilterResult ApplyFilterPolicy(const DatasetManifest& manifest,
                               const FilterPolicy& policy);

// Copy of `manifest` with the keep column set from `result`.
DatasetManifest MarkDecisions(const DatasetManifest& manifest,
                              const FilterResult& result);

void WriteFilterAudit(const std::vector<FilterAuditRow>& rows,
                      const std::filesystem::path& path);

// ------------------------------------------------------------- retention

struct RetentionRow {
  std::string dataset;
  int64_t pool_count = 0;
  int64_t core_count = 0;
  double retention_percent = 0.0;
};

struct RetentionReport {
  std::vector<RetentionRow> rows;  // sorted by dataset label
  RetentionRow total;

  // Rows from raw counts, kept in the given order.
  static RetentionReport FromCounts(std::vector<RetentionRow> rows);
};

// Per dataset label (sub_split respected). Throws ValidationError if a core
// record is missing from the pool.
RetentionReport ComputeRetention(const DatasetManifest& pool,
                                 const DatasetManifest& core);

// ------------------------------------------------------------- ablations

// Seeded random subset whose duration is within 0.1% of `target_hours`,
// drawn proportionally to each source dataset's share of the hours.
DatasetManifest MatchedSubset(const DatasetManifest& manifest, double target_hours,
                              uint64_t seed);

// Removes every record whose asset's source_dataset (or dataset label)
// equals `dataset_name`.
DatasetManifest ExcludeSource(const DatasetManifest& manifest,
                              const std::string& dataset_name);

}  // namespace speechcurate

#endif  // SPEECHCURATE_QUALITY_FILTER_H_
