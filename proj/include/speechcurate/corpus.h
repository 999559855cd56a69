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

#ifndef SPEECHCURATE_CORPUS_H_
#define SPEECHCURATE_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace speechcurate {

/// Per-segment quality triple: DNSMOS, WER (a ratio, may exceed 1) and
/// speech ratio.
struct QualityScores {
  double dnsmos = 0.0;
  double wer = 0.0;
  double speech_ratio = 0.0;

  bool operator==(const QualityScores&) const = default;
};

enum class Metric { kDnsmos, kWer, kSpeechRatio };

const char* MetricName(Metric metric);
double MetricValue(const QualityScores& scores, Metric metric);
// True when larger values mean better quality.
bool HigherIsBetter(Metric metric);

/// A source recording. One asset owns many segments.
struct AudioAsset {
  std::string asset_id;
  std::string source_dataset;
  std::optional<std::string> sub_split;
  std::string uri;
  double duration_s = 0.0;
  int sample_rate_hz = 16000;
  int channels = 1;
  std::string language = "en";
  std::string license;

  // "People's Speech (Clean)" style label used for per-dataset reports.
  std::string DatasetLabel() const;

  bool operator==(const AudioAsset&) const = default;
};

/// One utterance-level speech-text pair.
struct SegmentRecord {
  std::string segment_id;
  std::string asset_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::optional<std::string> speaker_id;
  std::optional<QualityScores> scores;
  std::map<std::string, std::string> tags;
  // Filter decision column; absent until a filter stage has run.
  std::optional<bool> keep;
  // Why scoring failed for this record, if it did.
  std::optional<std::string> score_error;

  double duration_s() const { return end_s - start_s; }

  bool operator==(const SegmentRecord&) const = default;
};

struct DatasetStats {
  double total_hours = 0.0;
  int64_t segment_count = 0;
  double avg_duration_s = 0.0;
  // Unweighted segment means over scored records; absent without scores.
  std::optional<double> mean_dnsmos;
  std::optional<double> mean_wer;
  std::optional<double> mean_speech_ratio;
  int64_t scored_count = 0;
};

/// Streaming form of ComputeDatasetStats, usable on corpora that are never
/// materialized in memory.
class StatsAccumulator {
 public:
  void Add(double duration_s, const std::optional<QualityScores>& scores);
  void AddMillis(int64_t duration_ms);
  void Merge(const StatsAccumulator& other);
  DatasetStats Finish() const;

 private:
  int64_t count_ = 0;
  // Exact millisecond total; durations carry ms precision.
  int64_t total_ms_ = 0;
  int64_t scored_ = 0;
  double sum_dnsmos_ = 0.0;
  double sum_wer_ = 0.0;
  double sum_sr_ = 0.0;
};

class DatasetManifest {
 public:
  DatasetManifest() = default;
  explicit DatasetManifest(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::vector<SegmentRecord>& records() const { return records_; }
  std::vector<SegmentRecord>& mutable_records() { return records_; }
  const std::map<std::string, AudioAsset>& assets() const { return assets_; }

  const std::optional<DatasetStats>& stats() const { return stats_; }
  void set_stats(DatasetStats stats) { stats_ = stats; }

  // Adding an asset with an existing id replaces it only if identical;
  // conflicting definitions throw ValidationError.
  void AddAsset(AudioAsset asset);
  void AddRecord(SegmentRecord record) { records_.push_back(std::move(record)); }

  const AudioAsset* FindAsset(const std::string& asset_id) const;
  // Source dataset of a record, via its asset.
  const AudioAsset& AssetOf(const SegmentRecord& record) const;

  // Sorts records by (asset_id, start_s, segment_id).
  void Canonicalize();
  // Throws ValidationError naming the offending record.
  void Validate() const;

  double TotalHours() const;

  // Copy holding only the records for which `pred` is true, with the
  // assets they reference.
  template <typename Pred>
  DatasetManifest Filtered(Pred pred) const {
    DatasetManifest out(name_);
    for (const auto& r : records_) {
      if (pred(r)) {
        out.records_.push_back(r);
        auto it = assets_.find(r.asset_id);
        if (it != assets_.end()) out.assets_.emplace(it->first, it->second);
      }
    }
    return out;
  }

  bool operator==(const DatasetManifest& other) const {
    return name_ == other.name_ && records_ == other.records_ &&
           assets_ == other.assets_;
  }

 private:
  std::string name_;
  std::vector<SegmentRecord> records_;
  std::map<std::string, AudioAsset> assets_;
  std::optional<DatasetStats> stats_;
};

bool CanonicalLess(const SegmentRecord& a, const SegmentRecord& b);

DatasetStats ComputeDatasetStats(const DatasetManifest& manifest);

// Stats keyed by AudioAsset::DatasetLabel().
std::map<std::string, DatasetStats> ComputePerDatasetStats(
    const DatasetManifest& manifest);

}  // namespace speechcurate

#endif  // SPEECHCURATE_CORPUS_H_
