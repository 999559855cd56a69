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
#include "speechcurate/quality_filter.h"
#include "test_support.h"

using namespace speechcurate;
using testing::MakeAsset;
using testing::MakeRecord;

namespace {

DatasetManifest ScoredCorpus(Rng& rng, int n, const std::string& dataset = "D",
                             bool distinct = true) {
  DatasetManifest m("pool");
  m.AddAsset(MakeAsset("a", dataset, 1e6));
  for (int i = 0; i < n; ++i) {
    SegmentRecord r = MakeRecord("s" + std::to_string(100000 + i), "a", i * 10.0, i * 10.0 + 5.0);
    if (distinct) {
      r.scores = QualityScores{1.0 + 4.0 * rng.UniformReal(), 2.0 * rng.UniformReal(),
                               rng.UniformReal()};
    } else {
      r.scores = QualityScores{1.0 + static_cast<double>(rng.UniformIndex(5)),
                               0.1 * static_cast<double>(rng.UniformIndex(4)),
                               0.25 * static_cast<double>(rng.UniformIndex(4))};
    }
    m.AddRecord(r);
  }
  return m;
}

std::set<std::string> Ids(const DatasetManifest& m) {
  std::set<std::string> out;
  for (const auto& r : m.records()) out.insert(r.segment_id);
  return out;
}

}  // namespace

TEST_SUITE("quality_filter") {

TEST_CASE("percentile interpolates linearly") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  CHECK(ComputePercentile(v, 15.0) == doctest::Approx(15.85));
  CHECK(ComputePercentile(v, 0.0) == 1.0);
  CHECK(ComputePercentile(v, 100.0) == 100.0);
  CHECK(ComputePercentile({4.0}, 50.0) == 4.0);
  CHECK_THROWS(ComputePercentile({}, 50.0));
}

TEST_CASE("quality ranks match pairwise counting") {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + rng.UniformIndex(30));
    for (auto& x : v) x = static_cast<double>(rng.UniformIndex(6));
    for (bool hib : {true, false}) {
      auto got = QualityRanks(v, hib);
      auto want = testing::PairwiseRanks(v, hib);
      REQUIRE(got.size() == want.size());
      for (size_t i = 0; i < v.size(); ++i) CHECK(got[i] == want[i]);
    }
  }
}

TEST_CASE("policy parsing and identifiers") {
  CHECK(ParseFilterMode("combined") == FilterMode::kCombined);
  CHECK(ParseFilterMode("vad") == FilterMode::kVad);
  CHECK_THROWS(ParseFilterMode("magic"));
  FilterPolicy p;
  CHECK(p.Id() == "combined@p15");
  p.mode = FilterMode::kWer;
  p.overrides = AbsoluteOverrides::Reference();
  CHECK(p.Id() == "wer@abs0.35");
  p.removal_percentile = 120.0;
  CHECK_THROWS_AS(p.Validate(), ConfigError);
}

TEST_CASE("per-metric orientation with absolute overrides") {
  DatasetManifest m("m");
  m.AddAsset(MakeAsset("a", "D"));
  auto add = [&](const char* id, QualityScores s) {
    SegmentRecord r = MakeRecord(id, "a", 0.0, 4.0);
    r.scores = s;
    m.AddRecord(r);
  };
  add("low_dns", {2.23, 0.1, 0.9});
  add("eq_dns", {2.24, 0.1, 0.9});
  add("high_wer", {3.0, 0.36, 0.9});
  add("eq_wer", {3.0, 0.35, 0.9});
  add("low_sr", {3.0, 0.1, 0.78});
  add("sr_ok", {3.0, 0.1, 0.80});
  FilterPolicy p;
  p.overrides = AbsoluteOverrides::Reference();
  p.mode = FilterMode::kDnsmos;
  CHECK(Ids(ApplyFilterPolicy(m, p).dropped) == std::set<std::string>{"low_dns"});
  p.mode = FilterMode::kWer;
  CHECK(Ids(ApplyFilterPolicy(m, p).dropped) == std::set<std::string>{"high_wer"});
  p.mode = FilterMode::kVad;
  CHECK(Ids(ApplyFilterPolicy(m, p).dropped) == std::set<std::string>{"low_sr"});
  p.mode = FilterMode::kNone;
  CHECK(ApplyFilterPolicy(m, p).kept.records().size() == m.records().size());
}

TEST_CASE("percentile filters remove the requested share") {
  Rng rng(12);
  DatasetManifest m = ScoredCorpus(rng, 2000);
  for (FilterMode mode : {FilterMode::kWer, FilterMode::kDnsmos, FilterMode::kVad,
                          FilterMode::kCombined}) {
    FilterPolicy p;
    p.mode = mode;
    for (double pct : {15.0, 50.0}) {
      p.removal_percentile = pct;
      FilterResult r = ApplyFilterPolicy(m, p);
      const double kept = static_cast<double>(r.kept.records().size()) / 2000.0;
      CHECK(kept == doctest::Approx(1.0 - pct / 100.0).epsilon(0.002));
      CHECK(r.kept.records().size() + r.dropped.records().size() == 2000);
      CHECK(r.audit.size() == 2000);
    }
  }
}

TEST_CASE("combined score dominance and shuffle invariance") {
  Rng rng(77);
  DatasetManifest m = ScoredCorpus(rng, 500, "D", false);
  FilterPolicy p;
  FilterResult r = CombinedRankFilter(m, p);
  std::map<std::string, const SegmentRecord*> by_id;
  for (const auto& x : m.records()) by_id[x.segment_id] = &x;
  const auto kept = Ids(r.kept);
  for (const auto& d : r.dropped.records()) {
    for (const auto& k : r.kept.records()) {
      const auto& a = *d.scores;
      const auto& b = *k.scores;
      // A dropped segment must not dominate a kept one.
      const bool dominates = a.dnsmos >= b.dnsmos && a.wer <= b.wer &&
                             a.speech_ratio >= b.speech_ratio &&
                             (a.dnsmos > b.dnsmos || a.wer < b.wer ||
                              a.speech_ratio > b.speech_ratio);
      CHECK_FALSE(dominates);
    }
  }
  DatasetManifest shuffled("pool");
  shuffled.AddAsset(m.assets().at("a"));
  auto recs = m.records();
  rng.Shuffle(&recs);
  for (auto& x : recs) shuffled.AddRecord(x);
  CHECK(Ids(CombinedRankFilter(shuffled, p).kept) == kept);
}

TEST_CASE("decisions are marked and unscored records rejected") {
  Rng rng(2);
  DatasetManifest m = ScoredCorpus(rng, 50);
  FilterResult r = ApplyFilterPolicy(m, {});
  DatasetManifest marked = MarkDecisions(m, r);
  const auto kept = Ids(r.kept);
  for (const auto& x : marked.records()) {
    REQUIRE(x.keep.has_value());
    CHECK(*x.keep == (kept.count(x.segment_id) == 1));
  }
  DatasetManifest unscored("u");
  unscored.AddAsset(MakeAsset("a", "D"));
  unscored.AddRecord(MakeRecord("x", "a", 0.0, 4.0));
  CHECK_THROWS_AS(ApplyFilterPolicy(unscored, {}), ValidationError);
}

TEST_CASE("retention from counts and manifests") {
  RetentionReport rep = RetentionReport::FromCounts({{"A", 10, 9, 0.0}, {"B", 10, 5, 0.0}});
  CHECK(rep.rows[0].retention_percent == doctest::Approx(90.0));
  CHECK(rep.total.pool_count == 20);
  CHECK(rep.total.retention_percent == doctest::Approx(70.0));

  DatasetManifest pool("pool");
  AudioAsset clean = MakeAsset("c", "People's Speech");
  clean.sub_split = "Clean";
  AudioAsset dirty = MakeAsset("d", "People's Speech");
  dirty.sub_split = "Dirty";
  pool.AddAsset(clean);
  pool.AddAsset(dirty);
  for (int i = 0; i < 4; ++i) {
    pool.AddRecord(MakeRecord("c" + std::to_string(i), "c", i * 5.0, i * 5.0 + 4.0));
    pool.AddRecord(MakeRecord("d" + std::to_string(i), "d", i * 5.0, i * 5.0 + 4.0));
  }
  DatasetManifest core = pool.Filtered([](const SegmentRecord& r) {
    return r.segment_id != "d0" && r.segment_id != "d1" && r.segment_id != "c3";
  });
  RetentionReport got = ComputeRetention(pool, core);
  REQUIRE(got.rows.size() == 2);
  CHECK(got.rows[0].dataset == "People's Speech (Clean)");
  CHECK(got.rows[0].core_count == 3);
  CHECK(got.rows[1].core_count == 2);
  CHECK(got.total.retention_percent == doctest::Approx(62.5));

  DatasetManifest stray = core;
  stray.AddRecord(MakeRecord("zz", "c", 50.0, 54.0));
  CHECK_THROWS_AS(ComputeRetention(pool, stray), ValidationError);
}

TEST_CASE("matched subsets hit the duration target") {
  DatasetManifest m("pool");
  m.AddAsset(MakeAsset("a", "A", 1e6));
  m.AddAsset(MakeAsset("b", "B", 1e6));
  Rng rng(5);
  double t = 0.0;
  for (int i = 0; i < 3000; ++i) {
    const double d = RoundToMillis(3.0 + rng.UniformReal() * 12.0);
    m.AddRecord(MakeRecord("s" + std::to_string(i), i % 3 ? "a" : "b", t, t + d));
    t += d + 1.0;
  }
  const double target = m.TotalHours() * 0.4;
  DatasetManifest sub = MatchedSubset(m, target, 9);
  CHECK(std::abs(sub.TotalHours() - target) <= 0.001 * target);
  DatasetManifest again = MatchedSubset(m, target, 9);
  CHECK(Ids(again) == Ids(sub));
  CHECK_THROWS(MatchedSubset(m, m.TotalHours() * 2.0, 9));

  DatasetManifest no_b = ExcludeSource(m, "B");
  for (const auto& r : no_b.records()) CHECK(r.asset_id == "a");
}

}  // TEST_SUITE
