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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "speechcurate/config.h"
#include "speechcurate/manifest_io.h"
#include "speechcurate/pipeline.h"
#include "speechcurate/report.h"
#include "speechcurate/synth.h"
#include "test_support.h"

using namespace speechcurate;
using testing::TempDir;

namespace {

std::string Sh(const std::string& s) { return "'" + s + "'"; }

int RunCli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = Sh(SPEECHCURATE_CLI) + " " + args + " > " + Sh(log.string()) + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

SynthCorpus SmallCorpus(const std::filesystem::path& dir, int assets = 4) {
  SynthCorpusOptions o;
  o.out_dir = dir;
  o.assets = assets;
  o.seed = 3;
  o.min_asset_s = 25.0;
  o.max_asset_s = 40.0;
  return WriteSynthCorpus(o);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults and overrides") {
  PipelineConfig c = ParseConfig(R"({"shards": 4, "filter": {"mode": "wer",
      "removal_percentile": 50, "overrides": {"wer": 0.35}}, "stages": ["ingest"]})",
                                 "/base");
  CHECK(c.shards == 4);
  CHECK(c.filter.mode == FilterMode::kWer);
  CHECK(c.filter.removal_percentile == 50.0);
  CHECK(c.filter.overrides.wer == 0.35);
  CHECK(c.stages == std::vector<std::string>{"ingest"});
  CHECK(c.work_dir == "/base/work");
  CHECK(c.score.asr_model == "whisper-small");
  CHECK(c.segment.asr_model == "whisper-large-v3");
}

TEST_CASE("unknown keys and bad values are rejected") {
  try {
    ParseConfig(R"({"filter": {"mode": "wer", "percentile": 3}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("filter.percentile") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseConfig(R"({"shards": 0})"), ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"shards": "two"})"), ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"stages": ["ingest", "dance"]})"), ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"segment": {"max_segment_s": 1}})"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("[1, 2"), ConfigError);
}

TEST_CASE("fingerprints follow the options that matter") {
  PipelineConfig a = ParseConfig(R"({"filter": {"mode": "wer"}})");
  PipelineConfig b = ParseConfig(R"({"filter": {"mode": "dnsmos"}})");
  CHECK(a.StageFingerprint("segment") == b.StageFingerprint("segment"));
  PipelineConfig c = ParseConfig(R"({"segment": {"merge_gap_s": 0.3}})");
  CHECK(a.StageFingerprint("segment") != c.StageFingerprint("segment"));
  CHECK(a.StageFingerprint("segment") != a.StageFingerprint("score"));
}

}  // TEST_SUITE

TEST_SUITE("report") {

TEST_CASE("tables align columns") {
  const std::string t = RenderTable({{"Name", "N"}, {"alpha", "10"}, {"b", "7"}});
  std::istringstream in(t);
  std::string header, rule, row1;
  std::getline(in, header);
  std::getline(in, rule);
  std::getline(in, row1);
  CHECK(header.size() == row1.size());
  CHECK(rule.find_first_not_of('-') == std::string::npos);
}

TEST_CASE("histogram bins clamp outliers into the end bins") {
  Histogram h = BuildHistogram({0.0, 0.1, 0.5, 0.99, 1.0, 3.0, -1.0}, 0.0, 1.0, 10);
  int64_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total == 7);
  CHECK(h.counts.front() == 2);
  CHECK(h.counts.back() == 3);
  const std::string svg = RenderHistogramSvg(h, 0.35, "WER", "wer");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("class=\"threshold\"") != std::string::npos);
}

TEST_CASE("report thresholds follow the policy") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i / 100.0);
  FilterPolicy p;
  CHECK(ReportThreshold(v, Metric::kSpeechRatio, p) == doctest::Approx(0.1585));
  CHECK(ReportThreshold(v, Metric::kWer, p) == doctest::Approx(0.8515));
  p.overrides = AbsoluteOverrides::Reference();
  CHECK(ReportThreshold(v, Metric::kWer, p) == 0.35);
}

}  // TEST_SUITE

TEST_SUITE("pipeline") {

TEST_CASE("staged run writes every artifact and reuses finished shards") {
  TempDir tmp;
  SynthCorpus corpus = SmallCorpus(tmp.path());
  PipelineConfig config = LoadConfig(corpus.config_path);
  std::ostringstream out;
  {
    Pipeline p(config);
    p.set_output(&out);
    p.RunAll();
  }
  const auto work = tmp / "work";
  for (const char* f : {"ingested.jsonl", "segmented.jsonl", "scored.jsonl", "filtered.jsonl",
                        "core.jsonl", "filter_audit.jsonl", "filter_summary.json",
                        "reports/report.txt", "reports/hist_wer.svg", "reports/thresholds.jsonl",
                        "segment/shard-0000.scop"})
    CHECK_MESSAGE(std::filesystem::exists(work / f), f);
  DatasetManifest scored = ReadManifest(work / "scored.jsonl");
  CHECK(scored.records().size() > 0);
  for (const auto& r : scored.records()) {
    CHECK(r.scores.has_value());
    CHECK(r.duration_s() >= 3.0);
    CHECK(r.duration_s() <= 30.0);
  }
  for (const auto& [id, a] : scored.assets()) {
    CHECK(a.sample_rate_hz == 16000);
    CHECK(a.channels == 1);
  }
  DatasetManifest filtered = ReadManifest(work / "filtered.jsonl");
  for (const auto& r : filtered.records()) CHECK(r.keep.has_value());

  Pipeline again(config);
  StageReport seg = again.Segment();
  CHECK(seg.reused == config.shards);
  CHECK(seg.executed == 0);
  config.segment.segmenter.merge_gap_s = 0.4;
  Pipeline changed(config);
  CHECK(changed.Segment().executed == config.shards);
}

TEST_CASE("failing adapter shards are reported") {
  TempDir tmp;
  SynthCorpus corpus = SmallCorpus(tmp.path(), 3);
  PipelineConfig config = LoadConfig(corpus.config_path);
  config.max_attempts = 2;
  struct Broken : StubScorerClient {
    using StubScorerClient::StubScorerClient;
    std::string Transcribe(const AudioRef& a, const std::string& model) override {
      if (a.asset_id == "rec0001") throw AdapterError("asr offline", a.asset_id);
      return StubScorerClient::Transcribe(a, model);
    }
  } broken(corpus.stub_words_path, config.segment.segmenter);
  Pipeline p(config, &broken);
  p.Ingest();
  try {
    p.Segment();
    FAIL("expected StageFailedError");
  } catch (const StageFailedError& e) {
    CHECK(e.failed() == std::vector<int>{1});
    CHECK(p.last_shards()[1].attempts == 2);
    CHECK(p.last_shards()[0].status == ShardStatus::kDone);
  }
}

TEST_CASE("score errors are recorded per segment") {
  TempDir tmp;
  SynthCorpus corpus = SmallCorpus(tmp.path(), 2);
  PipelineConfig config = LoadConfig(corpus.config_path);
  StubScorerClient stub(corpus.stub_words_path, config.segment.segmenter);
  struct Flaky : StubScorerClient {
    using StubScorerClient::StubScorerClient;
    double Dnsmos(const AudioRef& a) override {
      if (a.asset_id == "rec0000") throw AdapterError("dnsmos offline", a.asset_id, false);
      return StubScorerClient::Dnsmos(a);
    }
  } flaky(corpus.stub_words_path, config.segment.segmenter);
  Pipeline p(config, &flaky);
  p.Ingest();
  p.Segment();
  p.Score();
  p.Filter();
  DatasetManifest scored = ReadManifest(tmp / "work" / "scored.jsonl");
  int errors = 0;
  for (const auto& r : scored.records()) {
    if (r.asset_id == "rec0000") {
      CHECK_FALSE(r.scores.has_value());
      CHECK(r.score_error.has_value());
      ++errors;
    } else {
      CHECK(r.scores.has_value());
    }
  }
  CHECK(errors > 0);
  for (const auto& r : ReadManifest(tmp / "work" / "filtered.jsonl").records())
    if (r.score_error) CHECK(*r.keep == false);
}

TEST_CASE("cli crash and restart converge to the uninterrupted result") {
  TempDir tmp;
  SynthCorpus corpus = SmallCorpus(tmp.path(), 5);
  const std::string cfg = corpus.config_path.string();
  const auto log = tmp / "cli.log";

  CHECK(RunCli("run --config " + Sh(cfg) + " --workers 1", log) == 0);
  const std::string reference = ReadFile(tmp / "work" / "scored.jsonl");
  const std::string ref_filtered = ReadFile(tmp / "work" / "filtered.jsonl");
  std::filesystem::remove_all(tmp / "work");

  CHECK(RunCli("ingest --config " + Sh(cfg), log) == 0);
  CHECK(RunCli("segment --config " + Sh(cfg), log) == 0);
  // Same corpus, but score dies after its first shard.
  std::string crash_cfg = ReadFile(corpus.config_path);
  crash_cfg.insert(crash_cfg.find('{') + 1, "\n  \"debug\": {\"crash_after_shards\": 1},");
  WriteFileAtomic(tmp / "crash.json", crash_cfg);
  CHECK(RunCli("score --workers 1 --config " + Sh((tmp / "crash.json").string()), log) != 0);
  CHECK_FALSE(std::filesystem::exists(tmp / "work" / "scored.jsonl"));
  CHECK(std::filesystem::exists(tmp / "work" / "score" / "shard-0000.done"));
  CHECK_FALSE(std::filesystem::exists(tmp / "work" / "score" / "shard-0002.done"));

  CHECK(RunCli("score --config " + Sh(cfg), log) == 0);
  CHECK(ReadFile(log).find("2 shard(s) run, 1 reused") != std::string::npos);
  CHECK(RunCli("filter --config " + Sh(cfg), log) == 0);
  CHECK(ReadFile(tmp / "work" / "scored.jsonl") == reference);
  CHECK(ReadFile(tmp / "work" / "filtered.jsonl") == ref_filtered);
}

TEST_CASE("cli reports errors with nonzero status") {
  TempDir tmp;
  const auto log = tmp / "cli.log";
  WriteFileAtomic(tmp / "bad.json", R"({"shards": 2, "surprise": true})");
  CHECK(RunCli("ingest --config " + Sh((tmp / "bad.json").string()), log) == 1);
  CHECK(ReadFile(log).find("surprise") != std::string::npos);
  CHECK(RunCli("--help", log) == 0);
  CHECK(RunCli("no-such-stage", log) != 0);
}

}  // TEST_SUITE
