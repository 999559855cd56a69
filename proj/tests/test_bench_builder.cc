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

#include <set>

#include "doctest.h"
#include "speechcurate/bench_builder.h"
#include "speechcurate/scorer_client.h"
#include "speechcurate/synth.h"
#include "test_support.h"

using namespace speechcurate;
using testing::MakeAsset;
using testing::MakeRecord;
using testing::TempDir;

namespace {

DatasetManifest Speakers(const std::string& name, const std::vector<int>& sizes) {
  DatasetManifest m(name);
  m.AddAsset(MakeAsset(name + "-a", name, 1e6));
  int k = 0;
  for (size_t s = 0; s < sizes.size(); ++s) {
    for (int i = 0; i < sizes[s]; ++i, ++k) {
      SegmentRecord r = MakeRecord(name + "-" + std::to_string(1000 + k), name + "-a", k * 10.0,
                                   k * 10.0 + 5.0, "text number " + std::to_string(k));
      r.speaker_id = "spk" + std::to_string(s);
      m.AddRecord(r);
    }
  }
  return m;
}

}  // namespace

TEST_SUITE("bench_builder") {

TEST_CASE("stratum quotas are equal up to one and capped by supply") {
  auto q = StratumQuotas({{"a", 100}, {"b", 100}, {"c", 100}}, 10);
  CHECK(q["a"] + q["b"] + q["c"] == 10);
  CHECK(q["a"] == 4);  // remainder to the largest, ties by name
  CHECK(q["b"] == 3);
  auto capped = StratumQuotas({{"a", 2}, {"b", 50}, {"c", 50}}, 30);
  CHECK(capped["a"] == 2);
  CHECK(capped["b"] == 14);
  CHECK(capped["c"] == 14);
  CHECK_THROWS(StratumQuotas({{"a", 2}}, 5));

  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    std::map<std::string, int64_t> sizes;
    int64_t total = 0;
    for (uint64_t s = 1 + rng.UniformIndex(12); s > 0; --s) {
      const int64_t n = 1 + static_cast<int64_t>(rng.UniformIndex(60));
      sizes["s" + std::to_string(s)] = n;
      total += n;
    }
    const int64_t n = static_cast<int64_t>(rng.UniformIndex(static_cast<uint64_t>(total) + 1));
    auto quotas = StratumQuotas(sizes, n);
    int64_t sum = 0, lo = INT64_MAX, hi = 0;
    for (const auto& [k, v] : quotas) {
      sum += v;
      CHECK(v <= sizes[k]);
      if (v < sizes[k]) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    CHECK(sum == n);
    if (lo != INT64_MAX) CHECK(hi - lo <= 1);
    // An exhausted stratum never holds fewer than an open one.
    for (const auto& [k, v] : quotas)
      if (v == sizes[k] && lo != INT64_MAX) CHECK(v <= hi);
  }
}

TEST_CASE("stratified sample respects quotas and seeds") {
  DatasetManifest m = Speakers("X", {30, 30, 5, 30});
  std::string key;
  auto s = StratifiedSample(m.records(), 40, {"speaker_id", "emotion"}, 3, &key);
  CHECK(key == "speaker_id");
  REQUIRE(s.size() == 40);
  std::map<std::string, int> per;
  std::set<std::string> ids;
  for (const auto& r : s) {
    ++per[*r.speaker_id];
    ids.insert(r.segment_id);
  }
  CHECK(ids.size() == 40);
  CHECK(per["spk2"] == 5);
  CHECK(per["spk0"] + per["spk1"] + per["spk3"] == 35);
  auto again = StratifiedSample(m.records(), 40, {"speaker_id"}, 3);
  CHECK(again == s);
  auto other = StratifiedSample(m.records(), 40, {"speaker_id"}, 4);
  CHECK_FALSE(other == s);

  // Without a key on every record the sample is uniform.
  auto recs = m.records();
  recs[0].speaker_id.reset();
  std::string none = "unset";
  CHECK(StratifiedSample(recs, 10, {"speaker_id"}, 1, &none).size() == 10);
  CHECK(none.empty());
  CHECK_THROWS(StratifiedSample(recs, 1000, {"speaker_id"}, 1));
}

TEST_CASE("prompt pairing uses different segments and texts") {
  DatasetManifest m = Speakers("LibriSpeech-clean", {20, 20});
  auto prompts = StratifiedSample(m.records(), 10, {"speaker_id"}, 1);
  auto pairs = PairPrompts(prompts, m, 5, Category::kClean);
  REQUIRE(pairs.size() == 10);
  std::set<std::string> targets;
  for (const auto& p : pairs) {
    CHECK(p.prompt_segment_id != p.target_source_segment_id);
    CHECK(p.prompt_text != p.target_text);
    CHECK(p.source_dataset == "LibriSpeech-clean");
    targets.insert(p.target_source_segment_id);
  }
  CHECK(targets.size() == 10);
  CHECK(pairs[0].pair_id == "LibriSpeech-clean_0000");
  CHECK(pairs[0].prompt_uri == "/data/LibriSpeech-clean-a.wav");
}

TEST_CASE("zero-wer prefilter keeps exact transcripts only") {
  struct Echo : ScorerClient {
    std::string Transcribe(const AudioRef& a, const std::string&) override {
      if (a.start_s >= 40.0) throw AdapterError("down", a.asset_id);
      return a.start_s < 20.0 ? "TEXT number, " + std::to_string(static_cast<int>(a.start_s / 10))
                              : "garbled";
    }
  } echo;
  DatasetManifest m = Speakers("AMI-SDM", {6});
  std::vector<PrefilterDrop> drops;
  DatasetManifest kept = ZeroWerPrefilter(m, echo, "whisper-large-v3", &drops);
  CHECK(kept.records().size() == 2);
  CHECK(drops.size() == 4);
}

TEST_CASE("reference layout and deterministic output") {
  TempDir tmp;
  const BenchmarkConfig config = BenchmarkConfig::Reference();
  CHECK(config.categories.size() == 4);
  CHECK(config.zero_wer_datasets == std::set<std::string>{"AMI-SDM"});
  auto manifests = SynthBenchmarkManifests(config, 520, 11);
  // AMI-SDM needs an ASR pass; an echo of the record text passes all of them.
  struct EchoText : ScorerClient {
    std::map<std::string, std::string> text;
    std::string Transcribe(const AudioRef& a, const std::string&) override {
      return text.at(a.uri + "@" + std::to_string(a.start_s));
    }
  } echo;
  const auto& sdm = manifests.at("AMI-SDM");
  for (const auto& r : sdm.records())
    echo.text[sdm.AssetOf(r).uri + "@" + std::to_string(r.start_s)] = r.text;
  Benchmark a = BuildBenchmark(config, manifests, 21, &echo);
  CHECK(a.pairs.size() == 6000);
  CHECK(a.layout.category_totals.at("Clean") == 2500);
  CHECK(a.layout.category_totals.at("Noisy") == 1000);
  CHECK(a.layout.category_totals.at("Wild") == 1000);
  CHECK(a.layout.category_totals.at("Expressive") == 1500);
  WriteBenchmark(a, tmp / "a.jsonl");
  Benchmark b = BuildBenchmark(config, manifests, 21, &echo);
  WriteBenchmark(b, tmp / "b.jsonl");
  CHECK(ReadFile(tmp / "a.jsonl") == ReadFile(tmp / "b.jsonl"));
  CHECK(ReadFile(LayoutPathFor(tmp / "a.jsonl")) == ReadFile(LayoutPathFor(tmp / "b.jsonl")));
  CHECK(ReadBenchmark(tmp / "a.jsonl") == a.pairs);

  std::set<std::string> ids;
  for (const auto& p : a.pairs) ids.insert(p.pair_id);
  CHECK(ids.size() == 6000);

  CHECK_THROWS_AS(BuildBenchmark(config, manifests, 21, nullptr), Error);
  manifests.erase("VCTK");
  CHECK_THROWS_AS(BuildBenchmark(config, manifests, 21, &echo), ValidationError);
}

TEST_CASE("too few records names the dataset") {
  BenchmarkConfig c;
  c.categories.push_back({Category::kClean, {"Tiny"}, 50, {"speaker_id"}});
  std::map<std::string, DatasetManifest> ms;
  ms.emplace("Tiny", Speakers("Tiny", {10}));
  try {
    BuildBenchmark(c, ms, 1);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Tiny") != std::string::npos);
  }
}

TEST_CASE("prompt pair codec rejects junk") {
  PromptPair p;
  p.pair_id = "X_0000";
  p.category = Category::kWild;
  p.source_dataset = "X";
  p.prompt_segment_id = "x1";
  p.prompt_text = "a";
  p.target_text = "b";
  p.target_source_segment_id = "x2";
  p.prompt_uri = "/x.wav";
  p.prompt_start_s = 1.5;
  p.prompt_end_s = 4.25;
  CHECK(DecodePromptPair(EncodePromptPair(p), 1) == p);
  CHECK_THROWS_AS(DecodePromptPair(R"({"pair_id":"x"})", 1), ParseError);
  CHECK_THROWS(ParseCategory("Loud"));
}

}  // TEST_SUITE
