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

#include "speechcurate/quality_filter.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "speechcurate/manifest_io.h"
#include "speechcurate/segmentation.h"
#include "speechcurate/wer.h"

namespace speechcurate {

// ---------------------------------------------------------------- scoring

ScoreSummary ScoreSegments(DatasetManifest* manifest, ScorerClient& adapter,
                           const ScoreOptions& options) {
  ScoreSummary summary;
  auto& records = manifest->mutable_records();

  // Group record indices by asset so VAD runs once per recording.
  std::map<std::string, std::vector<size_t>> by_asset;
  for (size_t i = 0; i < records.size(); ++i) {
    SegmentRecord& r = records[i];
    if (r.scores && !options.force) {
      ++summary.skipped;
      continue;
    }
    by_asset[r.asset_id].push_back(i);
  }

  auto tokens = [&](const std::string& text) {
    return options.adapter_normalizer ? SplitWhitespace(adapter.Normalize(text))
                                      : NormalizeText(text);
  };

  for (const auto& [asset_id, indices] : by_asset) {
    const AudioAsset& asset = manifest->AssetOf(records[indices.front()]);
    AudioRef whole;
    whole.uri = asset.uri;
    whole.asset_id = asset_id;
    std::vector<SpeechRegion> regions;
    std::string vad_error;
    try {
      regions = adapter.Vad(whole);
    } catch (const AdapterError& e) {
      vad_error = std::string("vad: ") + e.what();
    }
    for (size_t i : indices) {
      SegmentRecord& r = records[i];
      r.scores.reset();
      r.score_error.reset();
      if (!vad_error.empty()) {
        r.score_error = vad_error;
        ++summary.failed;
        continue;
      }
      AudioRef ref = whole;
      ref.start_s = r.start_s;
      ref.end_s = r.end_s;
      try {
        QualityScores s;
        s.dnsmos = adapter.Dnsmos(ref);
        const std::string hyp = adapter.Transcribe(ref, options.asr_model);
        const TokenSequence ref_tokens = tokens(r.text);
        if (ref_tokens.empty()) throw UndefinedRateError("empty reference transcript");
        s.wer = WordErrorRate(ref_tokens, tokens(hyp)).rate;
        s.speech_ratio = SpeechRatio(r, regions);
        r.scores = s;
        ++summary.scored;
      } catch (const AdapterError& e) {
        r.score_error = e.what();
        ++summary.failed;
      } catch (const UndefinedRateError& e) {
        r.score_error = std::string("wer: ") + e.what();
        ++summary.failed;
      }
    }
  }
  return summary;
}

// ---------------------------------------------------------------- policy

double ComputePercentile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("percentile of an empty list");
  if (!(p >= 0.0 && p <= 100.0)) throw ValidationError("percentile outside [0, 100]");
  std::sort(values.begin(), values.end());
  const double idx = p / 100.0 * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(idx));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = idx - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

const char* FilterModeName(FilterMode mode) {
  switch (mode) {
    case FilterMode::kNone: return "none";
    case FilterMode::kWer: return "wer";
    case FilterMode::kDnsmos: return "dnsmos";
    case FilterMode::kVad: return "vad";
    case FilterMode::kCombined: return "combined";
  }
  return "?";
}

FilterMode ParseFilterMode(const std::string& name) {
  for (FilterMode m : {FilterMode::kNone, FilterMode::kWer, FilterMode::kDnsmos,
                       FilterMode::kVad, FilterMode::kCombined}) {
    if (name == FilterModeName(m)) return m;
  }
  throw ConfigError("unknown filter mode '" + name + "'");
}

std::optional<double> AbsoluteOverrides::For(Metric metric) const {
  switch (metric) {
    case Metric::kDnsmos: return dnsmos;
    case Metric::kWer: return wer;
    case Metric::kSpeechRatio: return speech_ratio;
  }
  return std::nullopt;
}

AbsoluteOverrides AbsoluteOverrides::Reference() { return {2.24, 0.35, 0.79}; }

void FilterPolicy::Validate() const {
  if (mode == FilterMode::kNone) return;
  if (!(removal_percentile >= 0.0 && removal_percentile <= 100.0))
    throw ConfigError("removal_percentile must be in [0, 100]");
}

std::string FilterPolicy::Id() const {
  std::string id = FilterModeName(mode);
  if (mode == FilterMode::kNone) return id;
  std::optional<double> o;
  if (mode == FilterMode::kWer) o = overrides.wer;
  if (mode == FilterMode::kDnsmos) o = overrides.dnsmos;
  if (mode == FilterMode::kVad) o = overrides.speech_ratio;
  return o ? id + "@abs" + ShortestReal(*o)
           : id + "@p" + ShortestReal(removal_percentile);
}

namespace {

Metric MetricForMode(FilterMode mode) {
  switch (mode) {
    case FilterMode::kWer: return Metric::kWer;
    case FilterMode::kDnsmos: return Metric::kDnsmos;
    case FilterMode::kVad: return Metric::kSpeechRatio;
    default: break;
  }
  throw std::logic_error("mode has no single metric");
}

const QualityScores& ScoresOf(const SegmentRecord& r) {
  if (!r.scores) throw ValidationError("record '" + r.segment_id + "' is not scored");
  return *r.scores;
}

FilterResult Split(const DatasetManifest& m, const std::vector<bool>& keep) {
  FilterResult out;
  size_t i = 0;
  out.kept = m.Filtered([&](const SegmentRecord&) { return keep[i++]; });
  i = 0;
  out.dropped = m.Filtered([&](const SegmentRecord&) { return !keep[i++]; });
  return out;
}

}  // namespace

std::vector<double> QualityRanks(const std::vector<double>& values,
                                 bool higher_is_better) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](size_t i) { return higher_is_better ? values[i] : -values[i]; };
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return key(a) < key(b); });
  std::vector<double> ranks(n);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && key(order[j + 1]) == key(order[i])) ++j;
    // Positions i..j (0-based) share rank mean(i+1 .. j+1).
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

FilterResult PerMetricFilter(const DatasetManifest& manifest, Metric metric,
                             const FilterPolicy& policy) {
  policy.Validate();
  const auto& recs = manifest.records();
  std::vector<double> values;
  values.reserve(recs.size());
  for (const auto& r : recs) values.push_back(MetricValue(ScoresOf(r), metric));

  const bool higher = HigherIsBetter(metric);
  double threshold;
  if (auto o = policy.overrides.For(metric)) {
    threshold = *o;
  } else if (values.empty()) {
    threshold = 0.0;
  } else {
    const double p = policy.removal_percentile;
    threshold = ComputePercentile(values, higher ? p : 100.0 - p);
  }
  std::vector<bool> keep(recs.size());
  for (size_t i = 0; i < recs.size(); ++i)
    keep[i] = higher ? values[i] >= threshold : values[i] <= threshold;

  FilterResult out = Split(manifest, keep);
  out.threshold = threshold;
  const std::string id = policy.Id();
  for (size_t i = 0; i < recs.size(); ++i) {
    FilterAuditRow a;
    a.segment_id = recs[i].segment_id;
    a.value = values[i];
    a.cutoff = threshold;
    a.keep = keep[i];
    a.policy = id;
    out.audit.push_back(std::move(a));
  }
  return out;
}

FilterResult CombinedRankFilter(const DatasetManifest& manifest,
                                const FilterPolicy& policy) {
  policy.Validate();
  const auto& recs = manifest.records();
  const Metric metrics[3] = {Metric::kDnsmos, Metric::kWer, Metric::kSpeechRatio};
  std::array<std::vector<double>, 3> ranks;
  for (int m = 0; m < 3; ++m) {
    std::vector<double> v;
    v.reserve(recs.size());
    for (const auto& r : recs) v.push_back(MetricValue(ScoresOf(r), metrics[m]));
    ranks[m] = QualityRanks(v, HigherIsBetter(metrics[m]));
  }
  std::vector<RankedSegment> ranked(recs.size());
  std::vector<double> combined(recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    ranked[i].segment_id = recs[i].segment_id;
    for (int m = 0; m < 3; ++m) ranked[i].ranks[m] = ranks[m][i];
    combined[i] = (ranks[0][i] + ranks[1][i] + ranks[2][i]) / 3.0;
    ranked[i].combined_score = combined[i];
  }
  const double cutoff =
      recs.empty() ? 0.0 : ComputePercentile(combined, policy.removal_percentile);
  std::vector<bool> keep(recs.size());
  for (size_t i = 0; i < recs.size(); ++i) keep[i] = combined[i] >= cutoff;

  FilterResult out = Split(manifest, keep);
  out.threshold = cutoff;
  const std::string id = policy.Id();
  for (size_t i = 0; i < recs.size(); ++i) {
    FilterAuditRow a;
    a.segment_id = recs[i].segment_id;
    a.ranks = ranked[i].ranks;
    a.combined_score = combined[i];
    a.cutoff = cutoff;
    a.keep = keep[i];
    a.policy = id;
    out.audit.push_back(std::move(a));
  }
  out.ranked = std::move(ranked);
  return out;
}

FilterResult ApplyFilterPolicy(const DatasetManifest& manifest,
                               const FilterPolicy& policy) {
  switch (policy.mode) {
    case FilterMode::kNone: {
      FilterResult out;
      out.kept = manifest;
      out.dropped = DatasetManifest(manifest.name());
      for (const auto& r : manifest.records())
        out.audit.push_back({r.segment_id, std::nullopt, std::nullopt, std::nullopt,
                             0.0, true, policy.Id()});
      return out;
    }
    case FilterMode::kCombined:
      return CombinedRankFilter(manifest, policy);
    default:
      return PerMetricFilter(manifest, MetricForMode(policy.mode), policy);
  }
}

DatasetManifest MarkDecisions(const DatasetManifest& manifest,
                              const FilterResult& result) {
  std::unordered_set<std::string> kept;
  for (const auto& r : result.kept.records()) kept.insert(r.segment_id);
  DatasetManifest out = manifest;
  for (auto& r : out.mutable_records()) r.keep = kept.count(r.segment_id) > 0;
  return out;
}

void WriteFilterAudit(const std::vector<FilterAuditRow>& rows,
                      const std::filesystem::path& path) {
  std::string text;
  for (const auto& a : rows) {
    LineBuilder b;
    b.Str("segment_id", a.segment_id);
    if (a.ranks) {
      b.Real("rank_dnsmos", (*a.ranks)[0]);
      b.Real("rank_wer", (*a.ranks)[1]);
      b.Real("rank_speech_ratio", (*a.ranks)[2]);
    }
    if (a.combined_score) b.Real("combined_score", *a.combined_score);
    if (a.value) b.Real("value", *a.value);
    b.Real("cutoff", a.cutoff).Bool("keep", a.keep).Str("policy", a.policy);
    text += b.Finish() + "\n";
  }
  WriteFileAtomic(path, text);
}

// ---------------------------------------------------------------- retention

RetentionReport RetentionReport::FromCounts(std::vector<RetentionRow> rows) {
  RetentionReport out;
  out.total.dataset = "Total";
  for (auto& r : rows) {
    if (r.core_count > r.pool_count || r.core_count < 0)
      throw ValidationError("retention row '" + r.dataset + "' has core > pool");
    r.retention_percent =
        r.pool_count > 0 ? 100.0 * static_cast<double>(r.core_count) / r.pool_count : 0.0;
    out.total.pool_count += r.pool_count;
    out.total.core_count += r.core_count;
  }
  out.total.retention_percent =
      out.total.pool_count > 0
          ? 100.0 * static_cast<double>(out.total.core_count) / out.total.pool_count
          : 0.0;
  out.rows = std::move(rows);
  return out;
}

RetentionReport ComputeRetention(const DatasetManifest& pool,
                                 const DatasetManifest& core) {
  std::unordered_map<std::string, std::string> label_of;
  std::map<std::string, RetentionRow> rows;
  for (const auto& r : pool.records()) {
    const std::string label = pool.AssetOf(r).DatasetLabel();
    label_of.emplace(r.segment_id, label);
    rows[label].pool_count++;
  }
  for (const auto& r : core.records()) {
    auto it = label_of.find(r.segment_id);
    if (it == label_of.end())
      throw ValidationError("core record '" + r.segment_id + "' is not in the pool");
    rows[it->second].core_count++;
  }
  std::vector<RetentionRow> list;
  for (auto& [label, row] : rows) {
    row.dataset = label;
    list.push_back(row);
  }
  return RetentionReport::FromCounts(std::move(list));
}

// ---------------------------------------------------------------- ablations

DatasetManifest MatchedSubset(const DatasetManifest& manifest, double target_hours,
                              uint64_t seed) {
  const auto& recs = manifest.records();
  int64_t total_ms = 0;
  std::map<std::string, std::vector<size_t>> by_source;
  std::vector<int64_t> dur(recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    dur[i] = ToMillis(recs[i].end_s) - ToMillis(recs[i].start_s);
    total_ms += dur[i];
    by_source[manifest.AssetOf(recs[i]).source_dataset].push_back(i);
  }
  const int64_t target_ms = std::llround(target_hours * 3600.0 * 1000.0);
  if (target_hours < 0.0 || target_ms > total_ms)
    throw ValidationError("matched subset target " + FormatFixed(target_hours, 3) +
                          " h exceeds the available " +
                          FormatFixed(total_ms / 3.6e6, 3) + " h");
  const int64_t tol = static_cast<int64_t>(std::floor(1e-3 * static_cast<double>(target_ms)));

  std::vector<bool> chosen(recs.size(), false);
  std::vector<size_t> order;  // global scan order, dataset by dataset
  int64_t sum = 0;
  for (auto& [source, idx] : by_source) {
    Rng rng(DeriveSeed(seed, source));
    rng.Shuffle(&idx);
    int64_t src_ms = 0;
    for (size_t i : idx) src_ms += dur[i];
    // Quota proportional to the dataset's share of the hours.
    const int64_t quota = static_cast<int64_t>(
        std::llround(static_cast<long double>(target_ms) * src_ms / std::max<int64_t>(total_ms, 1)));
    int64_t got = 0;
    for (size_t i : idx) {
      if (got + dur[i] <= quota) {
        chosen[i] = true;
        got += dur[i];
      }
    }
    sum += got;
    order.insert(order.end(), idx.begin(), idx.end());
  }
  // Global first-fit to absorb per-dataset rounding.
  for (size_t i : order) {
    if (!chosen[i] && sum + dur[i] <= target_ms) {
      chosen[i] = true;
      sum += dur[i];
    }
  }
  // Single swaps: replace a chosen record by a longer unchosen one when it
  // closes the remaining gap.
  if (target_ms - sum > tol) {
    std::vector<size_t> spare;
    for (size_t i : order)
      if (!chosen[i]) spare.push_back(i);
    std::stable_sort(spare.begin(), spare.end(),
                     [&](size_t a, size_t b) { return dur[a] < dur[b]; });
    for (size_t i : order) {
      if (target_ms - sum <= tol) break;
      if (!chosen[i]) continue;
      const int64_t gap = target_ms - sum;
      // Largest spare with dur <= dur[i] + gap.
      auto it = std::upper_bound(spare.begin(), spare.end(), dur[i] + gap,
                                 [&](int64_t v, size_t j) { return v < dur[j]; });
      if (it == spare.begin()) continue;
      --it;
      if (dur[*it] <= dur[i] || chosen[*it]) continue;
      chosen[*it] = true;
      chosen[i] = false;
      sum += dur[*it] - dur[i];
      *it = i;  // the swapped-out record becomes a spare
      std::stable_sort(spare.begin(), spare.end(),
                       [&](size_t a, size_t b) { return dur[a] < dur[b]; });
    }
  }
  if (std::llabs(target_ms - sum) > tol)
    throw ValidationError("matched subset cannot reach " + FormatFixed(target_hours, 3) +
                          " h within 0.1% (closest " + FormatFixed(sum / 3.6e6, 3) + " h)");
  size_t k = 0;
  DatasetManifest out = manifest.Filtered([&](const SegmentRecord&) { return chosen[k++]; });
  out.set_name(manifest.name());
  return out;
}

DatasetManifest ExcludeSource(const DatasetManifest& manifest,
                              const std::string& dataset_name) {
  DatasetManifest out = manifest.Filtered([&](const SegmentRecord& r) {
    const AudioAsset& a = manifest.AssetOf(r);
    return a.source_dataset != dataset_name && a.DatasetLabel() != dataset_name;
  });
  for (const auto& [id, a] : manifest.assets()) {
    if (a.source_dataset != dataset_name && a.DatasetLabel() != dataset_name)
      out.AddAsset(a);
  }
  return out;
}

}  // namespace speechcurate
