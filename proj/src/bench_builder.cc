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

#include "speechcurate/bench_builder.h"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "json.hpp"
#include "speechcurate/manifest_io.h"
#include "speechcurate/wer.h"

namespace speechcurate {

const char* CategoryName(Category category) {
  switch (category) {
    case Category::kClean: return "Clean";
    case Category::kNoisy: return "Noisy";
    case Category::kWild: return "Wild";
    case Category::kExpressive: return "Expressive";
  }
  return "?";
}

Category ParseCategory(const std::string& name) {
  for (Category c : {Category::kClean, Category::kNoisy, Category::kWild,
                     Category::kExpressive}) {
    if (name == CategoryName(c)) return c;
  }
  throw ParseError("unknown category '" + name + "'");
}

BenchmarkConfig BenchmarkConfig::Reference() {
  BenchmarkConfig c;
  c.categories = {
      {Category::kClean,
       {"LibriSpeech-clean", "ST-AEDS", "CMU-ARCTIC", "L2-ARCTIC", "VCTK"}},
      {Category::kNoisy, {"LibriSpeech-other", "TED-LIUM3"}},
      {Category::kWild, {"AMI-IHM", "AMI-SDM"}},
      {Category::kExpressive, {"Expresso", "CREMA-D", "EmoV-DB"}},
  };
  c.zero_wer_datasets = {"AMI-SDM"};
  return c;
}

std::string BenchmarkConfig::Canonical() const {
  nlohmann::json j;
  j["asr_model"] = asr_model;
  j["zero_wer_datasets"] = zero_wer_datasets;
  for (const auto& c : categories) {
    j["categories"].push_back({{"category", CategoryName(c.category)},
                               {"datasets", c.datasets},
                               {"prompts_per_dataset", c.prompts_per_dataset},
                               {"strata_keys", c.strata_keys}});
  }
  return j.dump();
}

DatasetManifest ZeroWerPrefilter(const DatasetManifest& manifest, ScorerClient& asr,
                                 const std::string& model,
                                 std::vector<PrefilterDrop>* drops) {
  return manifest.Filtered([&](const SegmentRecord& r) {
    std::string reason;
    try {
      AudioRef ref;
      ref.uri = manifest.AssetOf(r).uri;
      ref.asset_id = r.asset_id;
      ref.start_s = r.start_s;
      ref.end_s = r.end_s;
      const double wer = WerOfStrings(r.text, asr.Transcribe(ref, model));
      if (wer == 0.0) return true;
      reason = "wer " + ShortestReal(wer);
    } catch (const AdapterError& e) {
      reason = std::string("adapter: ") + e.what();
    } catch (const UndefinedRateError&) {
      reason = "empty transcript";
    }
    if (drops) drops->push_back({r.segment_id, reason});
    return false;
  });
}

std::optional<std::string> StratumValue(const SegmentRecord& record,
                                        const std::string& key) {
  if (key == "speaker_id") return record.speaker_id;
  auto it = record.tags.find(key);
  if (it == record.tags.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, int64_t> StratumQuotas(const std::map<std::string, int64_t>& sizes,
                                             int64_t n) {
  int64_t available = 0;
  for (const auto& [name, size] : sizes) available += size;
  if (n < 0 || n > available)
    throw ValidationError("cannot sample " + std::to_string(n) + " of " +
                          std::to_string(available) + " records");
  std::map<std::string, int64_t> quota;
  // Water-filling: strata smaller than the equal share are taken whole.
  std::vector<std::pair<std::string, int64_t>> open;
  for (const auto& [name, size] : sizes)
    if (size > 0) open.emplace_back(name, size);
  std::stable_sort(open.begin(), open.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  int64_t remaining = n;
  size_t first = 0;
  while (first < open.size()) {
    const int64_t k = static_cast<int64_t>(open.size() - first);
    if (open[first].second > remaining / k) break;
    quota[open[first].first] = open[first].second;
    remaining -= open[first].second;
    ++first;
  }
  std::vector<std::pair<std::string, int64_t>> rest(open.begin() + first, open.end());
  if (!rest.empty()) {
    const int64_t k = static_cast<int64_t>(rest.size());
    const int64_t base = remaining / k;
    int64_t extra = remaining % k;
    std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (auto& [name, size] : rest) {
      quota[name] = base + (extra > 0 ? 1 : 0);
      if (extra > 0) --extra;
    }
  }
  for (const auto& [name, size] : sizes) quota.emplace(name, 0);
  return quota;
}

std::vector<SegmentRecord> StratifiedSample(const std::vector<SegmentRecord>& records,
                                            int64_t n,
                                            const std::vector<std::string>& strata_keys,
                                            uint64_t seed, std::string* stratum_key) {
  if (n < 0 || n > static_cast<int64_t>(records.size()))
    throw ValidationError("cannot sample " + std::to_string(n) + " of " +
                          std::to_string(records.size()) + " records");
  std::string key;
  for (const auto& k : strata_keys) {
    const bool everywhere = !records.empty() &&
        std::all_of(records.begin(), records.end(),
                    [&](const SegmentRecord& r) { return StratumValue(r, k).has_value(); });
    if (everywhere) {
      key = k;
      break;
    }
  }
  if (stratum_key) *stratum_key = key;

  std::map<std::string, std::vector<size_t>> strata;
  for (size_t i = 0; i < records.size(); ++i)
    strata[key.empty() ? std::string() : *StratumValue(records[i], key)].push_back(i);
  std::map<std::string, int64_t> sizes;
  for (const auto& [name, idx] : strata) sizes[name] = static_cast<int64_t>(idx.size());
  const auto quotas = StratumQuotas(sizes, n);

  Rng rng(seed);
  std::vector<SegmentRecord> out;
  out.reserve(static_cast<size_t>(n));
  for (auto& [name, idx] : strata) {
    rng.Shuffle(&idx);
    const int64_t q = quotas.at(name);
    for (int64_t i = 0; i < q; ++i) out.push_back(records[idx[static_cast<size_t>(i)]]);
  }
  return out;
}

std::vector<PromptPair> PairPrompts(const std::vector<SegmentRecord>& prompts,
                                    const DatasetManifest& dataset, uint64_t seed,
                                    Category category) {
  const auto& recs = dataset.records();
  if (recs.size() < 2)
    throw ValidationError("dataset '" + dataset.name() +
                          "' needs at least two segments for prompt pairing");
  std::vector<size_t> order(recs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(&order);

  std::vector<bool> used(recs.size(), false);
  size_t cursor = 0;  // everything before it is used
  std::vector<PromptPair> out;
  for (const auto& p : prompts) {
    auto acceptable = [&](size_t i, bool allow_same_text) {
      return recs[i].segment_id != p.segment_id &&
             (allow_same_text || recs[i].text != p.text);
    };
    std::optional<size_t> pick;
    for (size_t k = cursor; k < order.size(); ++k) {
      const size_t i = order[k];
      if (!used[i] && acceptable(i, false)) {
        pick = i;
        break;
      }
    }
    if (!pick) {
      // Supply exhausted: reuse a random acceptable target.
      std::vector<size_t> pool;
      for (size_t i : order)
        if (acceptable(i, false)) pool.push_back(i);
      if (pool.empty())
        for (size_t i : order)
          if (acceptable(i, true)) pool.push_back(i);
      pick = pool[rng.UniformIndex(pool.size())];
    }
    used[*pick] = true;
    while (cursor < order.size() && used[order[cursor]]) ++cursor;

    PromptPair pair;
    char idx[16];
    std::snprintf(idx, sizeof(idx), "_%04zu", out.size());
    pair.pair_id = dataset.name() + idx;
    pair.category = category;
    pair.source_dataset = dataset.name();
    pair.prompt_segment_id = p.segment_id;
    pair.prompt_text = p.text;
    pair.target_text = recs[*pick].text;
    pair.target_source_segment_id = recs[*pick].segment_id;
    if (const AudioAsset* a = dataset.FindAsset(p.asset_id)) pair.prompt_uri = a->uri;
    pair.prompt_start_s = p.start_s;
    pair.prompt_end_s = p.end_s;
    pair.speaker_id = p.speaker_id;
    out.push_back(std::move(pair));
  }
  return out;
}

Benchmark BuildBenchmark(const BenchmarkConfig& config,
                         const std::map<std::string, DatasetManifest>& manifests,
                         uint64_t seed, ScorerClient* asr) {
  Benchmark bench;
  bench.layout.seed = seed;
  bench.layout.config_hash = HexDigest(Fnv1a64(config.Canonical()));
  for (const auto& cat : config.categories) {
    for (const auto& name : cat.datasets) {
      auto it = manifests.find(name);
      if (it == manifests.end())
        throw ValidationError("benchmark dataset '" + name + "' has no manifest");
      DatasetManifest eligible = it->second;
      eligible.set_name(name);
      if (config.zero_wer_datasets.count(name)) {
        if (!asr) throw ConfigError("dataset '" + name + "' needs an ASR adapter");
        eligible = ZeroWerPrefilter(eligible, *asr, config.asr_model);
        eligible.set_name(name);
      }
      const int64_t need = cat.prompts_per_dataset;
      const int64_t have = static_cast<int64_t>(eligible.records().size());
      if (have < need)
        throw ValidationError("dataset '" + name + "' has " + std::to_string(have) +
                              " eligible records, " + std::to_string(need) + " needed");
      const uint64_t ds_seed = DeriveSeed(seed, name);
      LayoutRow row;
      row.category = cat.category;
      row.dataset = name;
      row.eligible = have;
      auto sampled = StratifiedSample(eligible.records(), need, cat.strata_keys, ds_seed,
                                      &row.stratum_key);
      auto stratum = [&](const SegmentRecord& r) {
        return row.stratum_key.empty() ? std::string() : *StratumValue(r, row.stratum_key);
      };
      for (const auto& r : eligible.records()) {
        ++row.supply[stratum(r)];
        row.quotas.emplace(stratum(r), 0);
      }
      for (const auto& r : sampled) ++row.quotas[stratum(r)];
      auto pairs = PairPrompts(sampled, eligible, DeriveSeed(ds_seed, "pairs"), cat.category);
      row.pairs = static_cast<int64_t>(pairs.size());
      bench.layout.category_totals[CategoryName(cat.category)] += row.pairs;
      bench.layout.total += row.pairs;
      bench.layout.rows.push_back(std::move(row));
      for (auto& p : pairs) bench.pairs.push_back(std::move(p));
    }
  }
  return bench;
}

std::string EncodePromptPair(const PromptPair& p) {
  LineBuilder b;
  b.Str("pair_id", p.pair_id)
      .Str("category", CategoryName(p.category))
      .Str("source_dataset", p.source_dataset)
      .Str("prompt_segment_id", p.prompt_segment_id)
      .Str("prompt_text", p.prompt_text)
      .Str("target_text", p.target_text)
      .Str("target_source_segment_id", p.target_source_segment_id)
      .Str("prompt_uri", p.prompt_uri)
      .Fixed("prompt_start_s", p.prompt_start_s, 3)
      .Fixed("prompt_end_s", p.prompt_end_s, 3);
  if (p.speaker_id) b.Str("speaker_id", *p.speaker_id);
  return b.Finish();
}

PromptPair DecodePromptPair(std::string_view line, size_t line_number) {
  FieldReader f(line, line_number);
  f.RejectUnknown({"pair_id", "category", "source_dataset", "prompt_segment_id",
                   "prompt_text", "target_text", "target_source_segment_id",
                   "prompt_uri", "prompt_start_s", "prompt_end_s", "speaker_id"});
  PromptPair p;
  p.pair_id = f.Str("pair_id");
  try {
    p.category = ParseCategory(f.Str("category"));
  } catch (const ParseError& e) {
    f.Fail("category", e.what());
  }
  p.source_dataset = f.Str("source_dataset");
  p.prompt_segment_id = f.Str("prompt_segment_id");
  p.prompt_text = f.Str("prompt_text");
  p.target_text = f.Str("target_text");
  p.target_source_segment_id = f.Str("target_source_segment_id");
  p.prompt_uri = f.OptStr("prompt_uri").value_or("");
  p.prompt_start_s = f.OptReal("prompt_start_s").value_or(0.0);
  p.prompt_end_s = f.OptReal("prompt_end_s").value_or(0.0);
  p.speaker_id = f.OptStr("speaker_id");
  if (p.prompt_segment_id == p.target_source_segment_id)
    f.Fail("target_source_segment_id", "equals the prompt segment");
  return p;
}

std::filesystem::path LayoutPathFor(const std::filesystem::path& bench_path) {
  std::filesystem::path p = bench_path;
  p.replace_extension(".layout.json");
  return p;
}

void WriteBenchmark(const Benchmark& bench, const std::filesystem::path& path) {
  std::string text;
  for (const auto& p : bench.pairs) text += EncodePromptPair(p) + "\n";
  WriteFileAtomic(path, text);

  nlohmann::ordered_json j;
  j["seed"] = bench.layout.seed;
  j["config_hash"] = bench.layout.config_hash;
  j["total"] = bench.layout.total;
  j["category_totals"] = bench.layout.category_totals;
  j["datasets"] = nlohmann::ordered_json::array();
  for (const auto& r : bench.layout.rows) {
    j["datasets"].push_back({{"dataset", r.dataset},
                             {"category", CategoryName(r.category)},
                             {"eligible", r.eligible},
                             {"pairs", r.pairs},
                             {"stratum_key", r.stratum_key},
                             {"quotas", r.quotas},
                             {"supply", r.supply}});
  }
  WriteFileAtomic(LayoutPathFor(path), j.dump(2) + "\n");
}

std::vector<PromptPair> ReadBenchmark(const std::filesystem::path& path) {
  auto pairs = ReadLines(path, DecodePromptPair);
  std::unordered_set<std::string> seen;
  for (const auto& p : pairs)
    if (!seen.insert(p.pair_id).second)
      throw ValidationError("duplicate pair_id '" + p.pair_id + "'");
  return pairs;
}

}  // namespace speechcurate
