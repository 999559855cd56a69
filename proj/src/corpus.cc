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

#include "speechcurate/corpus.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "speechcurate/util.h"

namespace speechcurate {

const char* MetricName(Metric metric) {
  switch (metric) {
    case Metric::kDnsmos:
      return "dnsmos";
    case Metric::kWer:
      return "wer";
    case Metric::kSpeechRatio:
      return "speech_ratio";
  }
  return "?";
}

double MetricValue(const QualityScores& scores, Metric metric) {
  switch (metric) {
    case Metric::kDnsmos:
      return scores.dnsmos;
    case Metric::kWer:
      return scores.wer;
    case Metric::kSpeechRatio:
      return scores.speech_ratio;
  }
  return 0.0;
}

bool HigherIsBetter(Metric metric) { return metric != Metric::kWer; }

std::string AudioAsset::DatasetLabel() const {
  if (sub_split && !sub_split->empty())
    return source_dataset + " (" + *sub_split + ")";
  return source_dataset;
}

void StatsAccumulator::Add(double duration_s,
                           const std::optional<QualityScores>& scores) {
  AddMillis(ToMillis(duration_s));
  if (scores) {
    ++scored_;
    sum_dnsmos_ += scores->dnsmos;
    sum_wer_ += scores->wer;
    sum_sr_ += scores->speech_ratio;
  }
}

void StatsAccumulator::AddMillis(int64_t duration_ms) {
  ++count_;
  total_ms_ += duration_ms;
}

void StatsAccumulator::Merge(const StatsAccumulator& other) {
  count_ += other.count_;
  total_ms_ += other.total_ms_;
  scored_ += other.scored_;
  sum_dnsmos_ += other.sum_dnsmos_;
  sum_wer_ += other.sum_wer_;
  sum_sr_ += other.sum_sr_;
}

DatasetStats StatsAccumulator::Finish() const {
  DatasetStats s;
  s.segment_count = count_;
  const double total_s = static_cast<double>(total_ms_) / 1000.0;
  s.total_hours = total_s / 3600.0;
  s.avg_duration_s = count_ > 0 ? total_s / static_cast<double>(count_) : 0.0;
  s.scored_count = scored_;
  if (scored_ > 0) {
    const double n = static_cast<double>(scored_);
    s.mean_dnsmos = sum_dnsmos_ / n;
    s.mean_wer = sum_wer_ / n;
    s.mean_speech_ratio = sum_sr_ / n;
  }
  return s;
}

void DatasetManifest::AddAsset(AudioAsset asset) {
  auto it = assets_.find(asset.asset_id);
  if (it != assets_.end()) {
    if (!(it->second == asset))
      throw ValidationError("conflicting definitions for asset " +
                            asset.asset_id);
    return;
  }
  std::string id = asset.asset_id;
  assets_.emplace(std::move(id), std::move(asset));
}

const AudioAsset* DatasetManifest::FindAsset(const std::string& asset_id) const {
  auto it = assets_.find(asset_id);
  return it == assets_.end() ? nullptr : &it->second;
}

const AudioAsset& DatasetManifest::AssetOf(const SegmentRecord& record) const {
  const AudioAsset* a = FindAsset(record.asset_id);
  if (a == nullptr)
    throw ValidationError("record " + record.segment_id +
                          " references unknown asset " + record.asset_id);
  return *a;
}

bool CanonicalLess(const SegmentRecord& a, const SegmentRecord& b) {
  if (a.asset_id != b.asset_id) return a.asset_id < b.asset_id;
  if (a.start_s != b.start_s) return a.start_s < b.start_s;
  return a.segment_id < b.segment_id;
}

void DatasetManifest::Canonicalize() {
  std::sort(records_.begin(), records_.end(), CanonicalLess);
}

void DatasetManifest::Validate() const {
  for (const auto& [id, asset] : assets_) {
    if (!(asset.duration_s > 0.0))
      throw ValidationError("asset " + id + ": duration_s must be > 0");
    if (asset.sample_rate_hz <= 0 || asset.channels <= 0)
      throw ValidationError("asset " + id +
                            ": sample_rate_hz and channels must be positive");
  }
  std::set<std::string_view> ids;
  for (const auto& r : records_) {
    if (r.segment_id.empty()) throw ValidationError("record with empty segment_id");
    if (!ids.insert(r.segment_id).second)
      throw ValidationError("duplicate segment_id " + r.segment_id);
    if (!(r.start_s >= 0.0) || !(r.start_s < r.end_s))
      throw ValidationError("record " + r.segment_id +
                            ": requires 0 <= start_s < end_s");
    const AudioAsset& asset = AssetOf(r);
    // One millisecond of slack for decimal rounding of stored times.
    if (r.end_s > asset.duration_s + 0.0005)
      throw ValidationError("record " + r.segment_id + ": end_s " +
                            FormatFixed(r.end_s, 3) +
                            " exceeds asset duration " +
                            FormatFixed(asset.duration_s, 3));
    if (r.scores) {
      const auto& s = *r.scores;
      if (!(s.dnsmos >= 1.0 && s.dnsmos <= 5.0))
        throw ValidationError("record " + r.segment_id + ": dnsmos out of [1,5]");
      if (!(s.wer >= 0.0))
        throw ValidationError("record " + r.segment_id + ": wer must be >= 0");
      if (!(s.speech_ratio >= 0.0 && s.speech_ratio <= 1.0))
        throw ValidationError("record " + r.segment_id +
                              ": speech_ratio out of [0,1]");
    }
  }
}

double DatasetManifest::TotalHours() const {
  int64_t ms = 0;
  for (const auto& r : records_) ms += ToMillis(r.duration_s());
  return static_cast<double>(ms) / 3.6e6;
}

DatasetStats ComputeDatasetStats(const DatasetManifest& manifest) {
  StatsAccumulator acc;
  for (const auto& r : manifest.records()) acc.Add(r.duration_s(), r.scores);
  return acc.Finish();
}

std::map<std::string, DatasetStats> ComputePerDatasetStats(
    const DatasetManifest& manifest) {
  std::map<std::string, StatsAccumulator> accs;
  for (const auto& r : manifest.records())
    accs[manifest.AssetOf(r).DatasetLabel()].Add(r.duration_s(), r.scores);
  std::map<std::string, DatasetStats> out;
  for (const auto& [label, acc] : accs) out.emplace(label, acc.Finish());
  return out;
}

}  // namespace speechcurate
