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

#include "speechcurate/pipeline.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "speechcurate/audio.h"
#include "speechcurate/audio_codec.h"
#include "speechcurate/bench_builder.h"
#include "speechcurate/eval_harness.h"
#include "speechcurate/external_stage.h"
#include "speechcurate/manifest_io.h"
#include "speechcurate/mos.h"
#include "speechcurate/quality_filter.h"
#include "speechcurate/report.h"
#include "speechcurate/resample.h"
#include "speechcurate/segmentation.h"

namespace speechcurate {

namespace fs = std::filesystem;

namespace {

// Exit status used by the crash hook, distinct from ordinary failures.
constexpr int kCrashExitCode = 75;

std::pair<size_t, size_t> ShardRange(size_t n, int shards, int shard) {
  const size_t s = static_cast<size_t>(shard);
  const size_t k = static_cast<size_t>(shards);
  return {s * n / k, (s + 1) * n / k};
}

std::vector<std::string> AssetIds(const DatasetManifest& m) {
  std::vector<std::string> ids;
  for (const auto& [id, a] : m.assets()) ids.push_back(id);
  return ids;  // std::map keeps them sorted
}

// Assets [begin, end) of `m` with their records.
DatasetManifest AssetSlice(const DatasetManifest& m, const std::vector<std::string>& ids,
                           size_t begin, size_t end, const std::string& name) {
  const std::set<std::string> keep(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                                   ids.begin() + static_cast<std::ptrdiff_t>(end));
  DatasetManifest out(name);
  for (const auto& id : keep) out.AddAsset(m.assets().at(id));
  for (const auto& r : m.records())
    if (keep.count(r.asset_id)) out.AddRecord(r);
  return out;
}

std::string Serialize(const DatasetManifest& m) {
  std::string s;
  for (const auto& [id, a] : m.assets()) s += EncodeAsset(a) + "\n";
  for (const auto& r : m.records()) s += EncodeRecord(r) + "\n";
  return s;
}

DatasetManifest ReadAssetTable(const fs::path& path) {
  DatasetManifest m(path.stem().string());
  for (auto& a : ReadLines(path, DecodeAsset)) m.AddAsset(std::move(a));
  return m;
}

Waveform LoadStandard(const std::string& uri) {
  Waveform w = DecodeAudioFile(uri);
  if (w.channels != 1) w = Downmix(w);
  if (w.sample_rate_hz != kStandardSampleRate) {
    w.samples = Resample(w.samples, w.sample_rate_hz, kStandardSampleRate);
    w.sample_rate_hz = kStandardSampleRate;
  }
  return w;
}

std::string Timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void WriteLines(const fs::path& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  WriteFileAtomic(path, text);
}

}  // namespace

StageFailedError::StageFailedError(const std::string& stage, std::vector<int> failed,
                                   const std::string& last_error)
    : Error([&] {
        std::string msg = "stage '" + stage + "' failed for shard(s)";
        for (int s : failed) msg += " " + std::to_string(s);
        if (!last_error.empty()) msg += ": " + last_error;
        return msg;
      }()),
      failed_(std::move(failed)) {}

std::unique_ptr<ScorerClient> MakeAdapter(const PipelineConfig& config) {
  if (config.adapters.stub)
    return std::make_unique<StubScorerClient>(config.adapters.stub_words,
                                              config.segment.segmenter);
  if (config.adapters.url.empty())
    throw ConfigError("adapters.url is required when stub adapters are off");
  HttpClientOptions o;
  o.read_timeout_s = config.adapters.timeout_s;
  o.max_in_flight = config.adapters.max_in_flight;
  return std::make_unique<HttpScorerClient>(config.adapters.url, o);
}

Pipeline::Pipeline(PipelineConfig config, ScorerClient* adapter)
    : config_(std::move(config)), adapter_(adapter), work_(config_.work_dir) {
  config_.Validate();
  if (!adapter_) {
    owned_ = MakeAdapter(config_);
    adapter_ = owned_.get();
  }
  fs::create_directories(work_);
}

void Pipeline::Log(const std::string& line) {
  std::lock_guard<std::mutex> lock(log_mu_);
  std::ofstream f(work_ / "run.log", std::ios::app);
  f << Timestamp() << " " << line << "\n";
}

void Pipeline::Print(const std::string& text) {
  if (!out_) return;
  std::lock_guard<std::mutex> lock(log_mu_);
  *out_ << text;
  out_->flush();
}

fs::path Pipeline::ShardPath(const std::string& stage, int shard) const {
  char name[32];
  std::snprintf(name, sizeof(name), "shard-%04d.jsonl", shard);
  return work_ / stage / name;
}

StageReport Pipeline::RunSharded(const std::string& stage,
                                 const std::vector<std::string>& inputs,
                                 const ShardBody& body) {
  const int n = static_cast<int>(inputs.size());
  const std::string fingerprint = config_.StageFingerprint(stage);
  StageReport report;
  report.stage = stage;
  report.shards = n;
  shards_.assign(static_cast<size_t>(n), ShardState{});

  std::vector<std::string> hashes(static_cast<size_t>(n));
  std::vector<int> pending;
  for (int s = 0; s < n; ++s) {
    ShardState& st = shards_[static_cast<size_t>(s)];
    st.shard_id = s;
    st.stage = stage;
    st.checkpoint = fs::path(ShardPath(stage, s)).replace_extension(".done");
    hashes[static_cast<size_t>(s)] = HexDigest(Fnv1a64(
        fingerprint + "\n" + std::to_string(s) + "/" + std::to_string(n) + "\n" +
        inputs[static_cast<size_t>(s)]));
    bool fresh = false;
    if (fs::exists(st.checkpoint) && fs::exists(ShardPath(stage, s))) {
      try {
        auto j = nlohmann::json::parse(ReadFile(st.checkpoint));
        fresh = j.value("hash", "") == hashes[static_cast<size_t>(s)];
      } catch (const std::exception&) {
        fresh = false;
      }
    }
    if (fresh) {
      st.status = ShardStatus::kDone;
      ++report.reused;
    } else {
      pending.push_back(s);
    }
  }

  std::atomic<size_t> next{0};
  std::mutex mu;
  std::vector<int> failed;
  std::string last_error;
  auto worker = [&] {
    for (;;) {
      const size_t k = next++;
      if (k >= pending.size()) return;
      const int s = pending[k];
      ShardState& st = shards_[static_cast<size_t>(s)];
      st.status = ShardStatus::kRunning;
      const fs::path out = ShardPath(stage, s);
      while (st.status == ShardStatus::kRunning) {
        ++st.attempts;
        try {
          fs::remove(st.checkpoint);
          body(s, out);
          nlohmann::ordered_json marker;
          marker["stage"] = stage;
          marker["shard"] = s;
          marker["hash"] = hashes[static_cast<size_t>(s)];
          WriteFileAtomic(st.checkpoint, marker.dump() + "\n");
          st.status = ShardStatus::kDone;
          Log(stage + " shard " + std::to_string(s) + " done (attempt " +
              std::to_string(st.attempts) + ")");
        } catch (const std::exception& e) {
          Log(stage + " shard " + std::to_string(s) + " attempt " +
              std::to_string(st.attempts) + " failed: " + e.what());
          if (st.attempts >= config_.max_attempts) {
            st.status = ShardStatus::kFailed;
            std::lock_guard<std::mutex> lock(mu);
            failed.push_back(s);
            last_error = e.what();
          }
        }
      }
      if (st.status == ShardStatus::kDone && config_.crash_after_shards > 0 &&
          ++completed_in_process_ >= config_.crash_after_shards) {
        Log("crash hook: exiting after " + std::to_string(config_.crash_after_shards) +
            " shard(s)");
        std::_Exit(kCrashExitCode);
      }
    }
  };
  const int threads = std::min<int>(config_.EffectiveWorkers(),
                                    std::max<int>(1, static_cast<int>(pending.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  report.executed = static_cast<int>(pending.size()) - static_cast<int>(failed.size());
  if (!failed.empty()) {
    std::sort(failed.begin(), failed.end());
    throw StageFailedError(stage, failed, last_error);
  }
  return report;
}

// ---------------------------------------------------------------- stages

StageReport Pipeline::Ingest() {
  if (config_.ingest.input.empty()) throw ConfigError("ingest.input is not set");
  const DatasetManifest raw = ReadAssetTable(config_.ingest.input);
  const auto ids = AssetIds(raw);
  std::vector<std::string> inputs;
  for (int s = 0; s < config_.shards; ++s) {
    auto [b, e] = ShardRange(ids.size(), config_.shards, s);
    std::string text;
    for (size_t i = b; i < e; ++i) {
      const AudioAsset& a = raw.assets().at(ids[i]);
      std::error_code ec;
      const auto size = fs::file_size(a.uri, ec);
      text += EncodeAsset(a) + " " + std::to_string(ec ? 0 : size) + "\n";
    }
    inputs.push_back(std::move(text));
  }
  const fs::path audio_dir = fs::absolute(work_ / "audio");
  fs::create_directories(audio_dir);

  StageReport report = RunSharded("ingest", inputs, [&](int s, const fs::path& out) {
    auto [b, e] = ShardRange(ids.size(), config_.shards, s);
    DatasetManifest shard("ingest");
    for (size_t i = b; i < e; ++i) {
      AudioAsset a = raw.assets().at(ids[i]);
      StandardizeResult std_audio;
      try {
        std_audio = StandardizeAudio(DecodeAudioFile(a.uri), config_.ingest.loudness);
      } catch (const Error& err) {
        throw Error("asset '" + a.asset_id + "': " + err.what());
      }
      if (std_audio.silent) Log("ingest: asset " + a.asset_id + " is silent");
      const fs::path wav = audio_dir / (a.asset_id + ".wav");
      WriteWav(wav, std_audio.audio);
      a.uri = wav.lexically_normal().string();
      a.sample_rate_hz = kStandardSampleRate;
      a.channels = 1;
      a.duration_s = std_audio.audio.duration_s();
      if (config_.ingest.separate)
        a.uri = ApplyExternalStage(a, "separate", *adapter_).output_uri;
      shard.AddAsset(std::move(a));
    }
    WriteManifest(shard, out);
  });
  std::vector<fs::path> parts;
  for (int s = 0; s < config_.shards; ++s) parts.push_back(ShardPath("ingest", s));
  DatasetManifest merged = MergeShards(parts);
  merged.set_name("ingested");
  report.output = work_ / "ingested.jsonl";
  WriteManifest(merged, report.output);
  Print("ingest: " + std::to_string(merged.assets().size()) + " assets standardized (" +
        std::to_string(report.executed) + " shard(s) run, " + std::to_string(report.reused) +
        " reused)\n");
  return report;
}

StageReport Pipeline::Segment() {
  const DatasetManifest ingested = ReadManifest(work_ / "ingested.jsonl");
  const auto ids = AssetIds(ingested);
  std::vector<std::string> inputs;
  for (int s = 0; s < config_.shards; ++s) {
    auto [b, e] = ShardRange(ids.size(), config_.shards, s);
    inputs.push_back(Serialize(AssetSlice(ingested, ids, b, e, "in")));
  }
  const SegmentOptions& opt = config_.segment;

  StageReport report = RunSharded("segment", inputs, [&](int s, const fs::path& out) {
    auto [b, e] = ShardRange(ids.size(), config_.shards, s);
    DatasetManifest shard("segment");
    OpusShardWriter archive;
    for (size_t i = b; i < e; ++i) {
      const AudioAsset& a = ingested.assets().at(ids[i]);
      shard.AddAsset(a);
      const Waveform w = LoadStandard(a.uri);
      AudioRef whole;
      whole.uri = a.uri;
      whole.asset_id = a.asset_id;
      const std::vector<SpeechRegion> regions =
          opt.vad == "adapter" ? adapter_->Vad(whole)
                               : DetectSpeechRegions(w.samples, w.sample_rate_hz, opt.segmenter);
      std::vector<SegmentRecord> segs = SegmentsFromRegions(regions, opt.segmenter, a.asset_id);
      std::vector<DiarizationTurn> turns;
      if (opt.diarize) turns = TurnsFromStage(ApplyExternalStage(a, "diarize", *adapter_));
      for (auto& r : segs) {
        AudioRef ref = whole;
        ref.start_s = r.start_s;
        ref.end_s = r.end_s;
        r.text = adapter_->Transcribe(ref, opt.asr_model);
        if (opt.diarize) r.speaker_id = DominantSpeaker(turns, r.start_s, r.end_s);
      }
      LengthFilterResult lf = LengthMismatchFilter(std::move(segs), opt.min_chars_per_s);
      for (auto& r : lf.kept) {
        if (opt.package_opus)
          archive.Add(r.segment_id, EncodeRecord(r), PackageOpus(w.Slice(r.start_s, r.end_s)));
        shard.AddRecord(std::move(r));
      }
    }
    WriteManifest(shard, out);
    if (opt.package_opus) archive.Write(fs::path(out).replace_extension(".scop"));
  });
  std::vector<fs::path> parts;
  for (int s = 0; s < config_.shards; ++s) parts.push_back(ShardPath("segment", s));
  DatasetManifest merged = MergeShards(parts);
  merged.set_name("segmented");
  report.output = work_ / "segmented.jsonl";
  WriteManifest(merged, report.output);
  Print("segment: " + std::to_string(merged.records().size()) + " segments from " +
        std::to_string(merged.assets().size()) + " assets (" + std::to_string(report.executed) +
        " shard(s) run, " + std::to_string(report.reused) + " reused)\n");
  return report;
}

StageReport Pipeline::Score() {
  const DatasetManifest segmented = ReadManifest(work_ / "segmented.jsonl");
  const auto ids = AssetIds(segmented);
  std::vector<std::string> inputs;
  for (int s = 0; s < config_.shards; ++s) {
    auto [b, e] = ShardRange(ids.size(), config_.shards, s);
    inputs.push_back(Serialize(AssetSlice(segmented, ids, b, e, "in")));
  }
  StageReport report = RunSharded("score", inputs, [&](int s, const fs::path& out) {
    auto [b, e] = ShardRange(ids.size(), config_.shards, s);
    DatasetManifest shard = AssetSlice(segmented, ids, b, e, "score");
    ScoreSegments(&shard, *adapter_, config_.score);
    WriteManifest(shard, out);
  });
  std::vector<fs::path> parts;
  for (int s = 0; s < config_.shards; ++s) parts.push_back(ShardPath("score", s));
  DatasetManifest merged = MergeShards(parts);
  merged.set_name("scored");
  report.output = work_ / "scored.jsonl";
  WriteManifest(merged, report.output);
  int64_t failed = 0;
  for (const auto& r : merged.records()) failed += r.score_error ? 1 : 0;
  Print("score: " + std::to_string(merged.records().size()) + " segments, " +
        std::to_string(failed) + " without scores (" + std::to_string(report.executed) +
        " shard(s) run, " + std::to_string(report.reused) + " reused)\n");
  return report;
}

void Pipeline::Filter() {
  const DatasetManifest scored = ReadManifest(work_ / "scored.jsonl");
  const DatasetManifest usable =
      scored.Filtered([](const SegmentRecord& r) { return r.scores.has_value(); });
  FilterResult result = ApplyFilterPolicy(usable, config_.filter);
  DatasetManifest decided = MarkDecisions(scored, result);
  decided.set_name("filtered");
  for (const auto& r : scored.records()) {
    if (!r.scores)
      result.audit.push_back({r.segment_id, std::nullopt, std::nullopt, std::nullopt,
                              result.threshold, false, "unscored"});
  }
  WriteManifest(decided, work_ / "filtered.jsonl");
  DatasetManifest core = result.kept;
  core.set_name("core");
  WriteManifest(core, work_ / "core.jsonl");
  WriteFilterAudit(result.audit, work_ / "filter_audit.jsonl");
  nlohmann::ordered_json summary;
  summary["policy"] = config_.filter.Id();
  summary["threshold"] = result.threshold;
  summary["pool"] = scored.records().size();
  summary["kept"] = core.records().size();
  summary["dropped"] = scored.records().size() - core.records().size();
  summary["unscored"] = scored.records().size() - usable.records().size();
  WriteFileAtomic(work_ / "filter_summary.json", summary.dump(2) + "\n");
  Print("filter: policy " + config_.filter.Id() + ", kept " +
        std::to_string(core.records().size()) + " of " + std::to_string(scored.records().size()) +
        " (threshold " + FormatFixed(result.threshold, 4) + ")\n");
}

void Pipeline::Stats() {
  fs::path src = work_ / "scored.jsonl";
  if (!fs::exists(src)) src = work_ / "segmented.jsonl";
  const DatasetManifest m = ReadManifest(src);
  const auto per = ComputePerDatasetStats(m);
  const auto total = ComputeDatasetStats(m);
  fs::create_directories(work_ / "reports");
  const std::string table = RenderStatsTable(per, total);
  WriteFileAtomic(work_ / "reports" / "stats.txt", table);
  WriteLines(work_ / "reports" / "stats.jsonl", StatsLines(per, total));
  Print(table);
}

void Pipeline::Report() {
  const fs::path reports = work_ / "reports";
  fs::create_directories(reports);
  const DatasetManifest scored = ReadManifest(work_ / "scored.jsonl");

  std::vector<std::string> threshold_lines;
  struct Plot {
    Metric metric;
    double lo, hi;
    const char* title;
    const char* label;
  };
  const Plot plots[] = {{Metric::kDnsmos, 1.0, 5.0, "DNSMOS", "DNSMOS"},
                        {Metric::kSpeechRatio, 0.0, 1.0, "Speech Ratio", "speech ratio"},
                        {Metric::kWer, 0.0, 1.0, "WER", "WER (ratio, last bin includes > 1)"}};
  for (const auto& p : plots) {
    std::vector<double> values;
    for (const auto& r : scored.records())
      if (r.scores) values.push_back(MetricValue(*r.scores, p.metric));
    const double t = ReportThreshold(values, p.metric, config_.filter);
    const Histogram h = BuildHistogram(values, p.lo, p.hi, config_.report.histogram_bins);
    WriteFileAtomic(reports / (std::string("hist_") + MetricName(p.metric) + ".svg"),
                    RenderHistogramSvg(h, t, p.title, p.label));
    threshold_lines.push_back(LineBuilder()
                                  .Str("table", "thresholds")
                                  .Str("metric", MetricName(p.metric))
                                  .Real("threshold", t)
                                  .Str("policy", config_.filter.Id())
                                  .Int("segments", static_cast<int64_t>(values.size()))
                                  .Finish());
  }
  WriteLines(reports / "thresholds.jsonl", threshold_lines);

  std::string text = "Dataset statistics\n\n";
  const auto per = ComputePerDatasetStats(scored);
  const auto total = ComputeDatasetStats(scored);
  text += RenderStatsTable(per, total);
  WriteLines(reports / "stats.jsonl", StatsLines(per, total));

  if (fs::exists(work_ / "core.jsonl")) {
    const RetentionReport ret = ComputeRetention(scored, ReadManifest(work_ / "core.jsonl"));
    text += "\nRetention after filtering (" + config_.filter.Id() + ")\n\n";
    text += RenderRetentionTable(ret);
    WriteLines(reports / "retention.jsonl", RetentionLines(ret));
  }
  const fs::path samples = work_ / "eval" / "samples.jsonl";
  if (fs::exists(samples)) {
    std::map<std::string, ObjectiveResult> by_model;
    std::vector<size_t> numbers;
    const auto lines = ReadNonBlankLines(samples, &numbers);
    for (size_t i = 0; i < lines.size(); ++i) {
      std::string model;
      SampleResult s = DecodeSampleResult(lines[i], numbers[i], &model);
      by_model[model].model_name = model;
      by_model[model].samples.push_back(std::move(s));
    }
    std::vector<ModelEvaluation> evals;
    for (const auto& [model, r] : by_model) evals.push_back(SummarizeEvaluation(model, r));
    text += "\nEvaluation\n\n" + RenderEvaluationTable(evals);
    WriteLines(reports / "evaluation.jsonl", EvaluationLines(evals));
  }
  WriteFileAtomic(reports / "report.txt", text);
  Print(text);
}

void Pipeline::BuildEval() {
  const BuildEvalOptions& o = config_.build_eval;
  BenchmarkConfig bc;
  if (o.use_reference) {
    bc = BenchmarkConfig::Reference();
    for (auto& c : bc.categories) c.prompts_per_dataset = o.prompts_per_dataset;
  } else {
    bc.categories = o.categories;
  }
  if (bc.categories.empty()) throw ConfigError("build_eval: no categories configured");
  for (const auto& d : o.zero_wer_datasets) bc.zero_wer_datasets.insert(d);
  std::map<std::string, DatasetManifest> manifests;
  for (const auto& [name, path] : o.manifests) manifests.emplace(name, ReadManifest(path));
  const Benchmark bench = BuildBenchmark(bc, manifests, config_.seed, adapter_);
  const fs::path out = o.output.empty() ? work_ / "benchmark.jsonl" : fs::path(o.output);
  WriteBenchmark(bench, out);
  std::vector<std::vector<std::string>> rows = {{"Category", "Dataset", "Eligible", "Pairs"}};
  for (const auto& r : bench.layout.rows)
    rows.push_back({CategoryName(r.category), r.dataset, std::to_string(r.eligible),
                    std::to_string(r.pairs)});
  for (const auto& [cat, n] : bench.layout.category_totals)
    rows.push_back({cat, "(total)", "", std::to_string(n)});
  rows.push_back({"All", "(total)", "", std::to_string(bench.layout.total)});
  Print(RenderTable(rows));
}

void Pipeline::Evaluate() {
  const EvaluateOptions& o = config_.evaluate;
  if (o.benchmark.empty()) throw ConfigError("evaluate.benchmark is not set");
  const auto pairs = ReadBenchmark(o.benchmark);
  const fs::path out_dir = o.output.empty() ? work_ / "eval" : fs::path(o.output);
  fs::create_directories(out_dir);
  std::vector<std::string> lines;
  std::vector<ModelEvaluation> evals;
  for (const auto& dir : o.generations) {
    std::string model;
    const auto gens = ScanGenerations(dir, &model);
    ObjectiveResult r = EvaluateModel(gens, pairs, *adapter_, o.eval);
    for (const auto& s : r.samples) lines.push_back(EncodeSampleResult(s, model));
    if (r.missing > 0)
      Print("evaluate: " + model + " is missing " + std::to_string(r.missing) + " generation(s)\n");
    evals.push_back(SummarizeEvaluation(model, r));
  }
  WriteLines(out_dir / "samples.jsonl", lines);
  const std::string table = RenderEvaluationTable(evals);
  WriteFileAtomic(out_dir / "evaluation.txt", table);
  WriteLines(out_dir / "evaluation.jsonl", EvaluationLines(evals));
  Print(table);
}

void Pipeline::AggregateMos() {
  const MosOptions& o = config_.aggregate_mos;
  if (o.input.empty()) throw ConfigError("aggregate_mos.input is not set");
  const auto items = ReadSubjectiveItems(o.input);
  int64_t dropped = 0;
  QcExclude(items, &dropped);
  const MosTable table = o.scale == "cmos" ? AggregateCmos(items) : AggregateSmos(items);
  const fs::path out = o.output.empty() ? work_ / "reports" / o.scale : fs::path(o.output);
  const std::string text = RenderMosTable(table, o.scale);
  WriteFileAtomic(fs::path(out).replace_extension(".txt"), text);
  WriteLines(fs::path(out).replace_extension(".jsonl"), MosLines(table, o.scale));
  Print(text + "qc: " + std::to_string(dropped) + " uniform page(s) excluded\n");
}

void Pipeline::RunStage(const std::string& stage) {
  Log("stage " + stage + " start");
  if (stage == "ingest") Ingest();
  else if (stage == "segment") Segment();
  else if (stage == "score") Score();
  else if (stage == "filter") Filter();
  else if (stage == "stats") Stats();
  else if (stage == "report") Report();
  else if (stage == "build-eval") BuildEval();
  else if (stage == "evaluate") Evaluate();
  else if (stage == "aggregate-mos") AggregateMos();
  else throw ConfigError("unknown stage '" + stage + "'");
  Log("stage " + stage + " done");
}

void Pipeline::RunAll() {
  for (const auto& s : config_.stages) RunStage(s);
}

}  // namespace speechcurate
