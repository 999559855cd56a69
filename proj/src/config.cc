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

#include "speechcurate/config.h"

#include <algorithm>
#include <set>
#include <thread>

#include "json.hpp"

namespace speechcurate {

using nlohmann::json;

namespace {

// Typed reader for one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path, const std::filesystem::path& base)
      : j_(j), path_(std::move(path)), base_(base) {
    if (!j_.is_object()) throw ConfigError("config: '" + Where() + "' must be an object");
  }

  template <typename T>
  void Get(const char* key, T* out) {
    const json* v = Find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!v->is_number_integer()) throw ConfigError("");
        *out = v->get<int>();
      } else if constexpr (std::is_same_v<T, uint64_t>) {
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<int64_t>() >= 0))
          throw ConfigError("");
        *out = v->get<uint64_t>();
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v->is_number()) throw ConfigError("");
        *out = v->get<double>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError("");
        *out = v->get<bool>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError("");
        *out = v->get<std::string>();
      } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        if (!v->is_array()) throw ConfigError("");
        out->clear();
        for (const auto& x : *v) {
          if (!x.is_string()) throw ConfigError("");
          out->push_back(x.get<std::string>());
        }
      } else {
        static_assert(sizeof(T) == 0, "unsupported config type");
      }
    } catch (const ConfigError&) {
      throw ConfigError("config: '" + Where(key) + "' has the wrong type");
    }
  }

  void Path(const char* key, std::string* out) {
    Get(key, out);
    if (!out->empty() && !base_.empty() && Find(key)) {
      std::filesystem::path p(*out);
      if (p.is_relative()) *out = (base_ / p).lexically_normal().string();
    }
  }

  void Paths(const char* key, std::vector<std::string>* out) {
    Get(key, out);
    if (!Find(key)) return;
    for (auto& s : *out) {
      std::filesystem::path p(s);
      if (p.is_relative() && !base_.empty()) s = (base_ / p).lexically_normal().string();
    }
  }

  void OptReal(const char* key, std::optional<double>* out) {
    if (!Find(key)) return;
    double v = 0.0;
    Get(key, &v);
    *out = v;
  }

  bool Has(const char* key) const { return j_.contains(key); }

  Section Child(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), Where(key), base_);
  }

  const json& Raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string Where(const std::string& key = {}) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const std::filesystem::path& base() const { return base_; }

  void Finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("config: unknown key '" + Where(k) + "'");
    }
  }

 private:
  const json* Find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::string path_;
  std::filesystem::path base_;
  std::set<std::string> seen_;
};

void ParseSegmenter(Section& s, SegmentOptions* o) {
  SegmenterConfig& c = o->segmenter;
  s.Get("min_segment_s", &c.min_segment_s);
  s.Get("max_segment_s", &c.max_segment_s);
  s.Get("merge_gap_s", &c.merge_gap_s);
  s.Get("frame_ms", &c.frame_ms);
  s.Get("hop_ms", &c.hop_ms);
  s.Get("hangover_ms", &c.hangover_ms);
  s.Get("min_region_ms", &c.min_region_ms);
  s.Get("energy_margin_db", &c.energy_margin_db);
  s.Get("abs_floor_dbfs", &c.abs_floor_dbfs);
  s.Get("max_noise_floor_dbfs", &c.max_noise_floor_dbfs);
  s.Get("vad", &o->vad);
  s.Get("diarize", &o->diarize);
  s.Get("asr_model", &o->asr_model);
  s.Get("min_chars_per_s", &o->min_chars_per_s);
  s.Get("package_opus", &o->package_opus);
  s.Finish();
}

void ParseBuildEval(Section& s, BuildEvalOptions* o) {
  if (s.Has("manifests")) {
    const json& m = s.Raw("manifests");
    if (!m.is_object()) throw ConfigError("config: 'build_eval.manifests' must be an object");
    for (const auto& [name, v] : m.items()) {
      if (!v.is_string())
        throw ConfigError("config: 'build_eval.manifests." + name + "' must be a path");
      std::filesystem::path p(v.get<std::string>());
      if (p.is_relative() && !s.base().empty()) p = (s.base() / p).lexically_normal();
      o->manifests[name] = p.string();
    }
  }
  s.Path("output", &o->output);
  s.Get("use_reference", &o->use_reference);
  s.Get("prompts_per_dataset", &o->prompts_per_dataset);
  s.Get("zero_wer_datasets", &o->zero_wer_datasets);
  if (s.Has("categories")) {
    const json& cats = s.Raw("categories");
    if (!cats.is_array()) throw ConfigError("config: 'build_eval.categories' must be a list");
    for (size_t i = 0; i < cats.size(); ++i) {
      Section c(cats[i], s.Where("categories") + "[" + std::to_string(i) + "]", s.base());
      CategoryConfig cc;
      std::string name;
      c.Get("category", &name);
      try {
        cc.category = ParseCategory(name);
      } catch (const ParseError& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
      c.Get("datasets", &cc.datasets);
      cc.prompts_per_dataset = o->prompts_per_dataset;
      c.Get("prompts_per_dataset", &cc.prompts_per_dataset);
      c.Get("strata_keys", &cc.strata_keys);
      c.Finish();
      o->categories.push_back(std::move(cc));
    }
  }
  s.Finish();
}

}  // namespace

const std::vector<std::string>& KnownStages() {
  static const std::vector<std::string> kStages = {
      "ingest", "segment", "score", "filter", "stats",
      "build-eval", "evaluate", "aggregate-mos", "report"};
  return kStages;
}

PipelineConfig ParseConfig(const std::string& json_text,
                           const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  PipelineConfig c;
  Section s(root, "", base_dir);
  s.Path("work_dir", &c.work_dir);
  if (!base_dir.empty() && std::filesystem::path(c.work_dir).is_relative())
    c.work_dir = (std::filesystem::path(base_dir) / c.work_dir).lexically_normal().string();
  s.Get("shards", &c.shards);
  s.Get("workers", &c.workers);
  s.Get("seed", &c.seed);
  s.Get("max_attempts", &c.max_attempts);
  s.Get("stages", &c.stages);
  if (s.Has("adapters")) {
    Section a = s.Child("adapters");
    a.Get("url", &c.adapters.url);
    a.Get("stub", &c.adapters.stub);
    a.Path("stub_words", &c.adapters.stub_words);
    a.Get("timeout_s", &c.adapters.timeout_s);
    a.Get("max_in_flight", &c.adapters.max_in_flight);
    a.Finish();
  }
  if (s.Has("ingest")) {
    Section a = s.Child("ingest");
    a.Path("input", &c.ingest.input);
    a.Get("target_rms_dbfs", &c.ingest.loudness.target_rms_dbfs);
    a.Get("peak_ceiling_dbfs", &c.ingest.loudness.peak_ceiling_dbfs);
    a.Get("separate", &c.ingest.separate);
    a.Finish();
  }
  if (s.Has("segment")) {
    Section a = s.Child("segment");
    ParseSegmenter(a, &c.segment);
  }
  if (s.Has("score")) {
    Section a = s.Child("score");
    a.Get("force", &c.score.force);
    a.Get("asr_model", &c.score.asr_model);
    a.Get("adapter_normalizer", &c.score.adapter_normalizer);
    a.Finish();
  }
  if (s.Has("filter")) {
    Section a = s.Child("filter");
    std::string mode = FilterModeName(c.filter.mode);
    a.Get("mode", &mode);
    c.filter.mode = ParseFilterMode(mode);
    a.Get("removal_percentile", &c.filter.removal_percentile);
    if (a.Has("overrides")) {
      Section o = a.Child("overrides");
      o.OptReal("dnsmos", &c.filter.overrides.dnsmos);
      o.OptReal("wer", &c.filter.overrides.wer);
      o.OptReal("speech_ratio", &c.filter.overrides.speech_ratio);
      o.Finish();
    }
    a.Finish();
  }
  if (s.Has("build_eval")) {
    Section a = s.Child("build_eval");
    ParseBuildEval(a, &c.build_eval);
  }
  if (s.Has("evaluate")) {
    Section a = s.Child("evaluate");
    a.Path("benchmark", &c.evaluate.benchmark);
    a.Paths("generations", &c.evaluate.generations);
    a.Get("asr_model", &c.evaluate.eval.asr_model);
    a.Get("adapter_normalizer", &c.evaluate.eval.adapter_normalizer);
    a.Path("output", &c.evaluate.output);
    a.Finish();
  }
  if (s.Has("aggregate_mos")) {
    Section a = s.Child("aggregate_mos");
    a.Path("input", &c.aggregate_mos.input);
    a.Get("scale", &c.aggregate_mos.scale);
    a.Path("output", &c.aggregate_mos.output);
    a.Finish();
  }
  if (s.Has("report")) {
    Section a = s.Child("report");
    a.Get("histogram_bins", &c.report.histogram_bins);
    a.Finish();
  }
  if (s.Has("debug")) {
    Section a = s.Child("debug");
    a.Get("crash_after_shards", &c.crash_after_shards);
    a.Finish();
  }
  s.Finish();
  c.Validate();
  return c;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return ParseConfig(text, std::filesystem::absolute(path).parent_path());
}

void PipelineConfig::Validate() const {
  if (shards < 1) throw ConfigError("config: shards must be >= 1");
  if (workers < 0) throw ConfigError("config: workers must be >= 0");
  if (max_attempts < 1) throw ConfigError("config: max_attempts must be >= 1");
  if (crash_after_shards < 0) throw ConfigError("config: crash_after_shards must be >= 0");
  for (const auto& st : stages) {
    const auto& known = KnownStages();
    if (std::find(known.begin(), known.end(), st) == known.end())
      throw ConfigError("config: unknown stage '" + st + "'");
  }
  if (adapters.max_in_flight < 1) throw ConfigError("config: max_in_flight must be >= 1");
  if (!(adapters.timeout_s > 0.0)) throw ConfigError("config: timeout_s must be > 0");
  if (ingest.loudness.peak_ceiling_dbfs > 0.0)
    throw ConfigError("config: peak_ceiling_dbfs must be <= 0");
  segment.segmenter.Validate();
  if (segment.vad != "builtin" && segment.vad != "adapter")
    throw ConfigError("config: segment.vad must be 'builtin' or 'adapter'");
  if (segment.min_chars_per_s < 0.0) throw ConfigError("config: min_chars_per_s must be >= 0");
  filter.Validate();
  if (build_eval.prompts_per_dataset < 1)
    throw ConfigError("config: prompts_per_dataset must be >= 1");
  if (aggregate_mos.scale != "cmos" && aggregate_mos.scale != "smos")
    throw ConfigError("config: aggregate_mos.scale must be 'cmos' or 'smos'");
  if (report.histogram_bins < 1) throw ConfigError("config: histogram_bins must be >= 1");
}

int PipelineConfig::EffectiveWorkers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string PipelineConfig::StageFingerprint(const std::string& stage) const {
  json j;
  j["stage"] = stage;
  j["adapter"] = adapters.stub ? std::string("stub") : adapters.url;
  if (adapters.stub && !adapters.stub_words.empty() &&
      std::filesystem::exists(adapters.stub_words))
    j["stub_words"] = HexDigest(Fnv1a64(ReadFile(adapters.stub_words)));
  if (stage == "ingest") {
    j["target_rms_dbfs"] = ingest.loudness.target_rms_dbfs;
    j["peak_ceiling_dbfs"] = ingest.loudness.peak_ceiling_dbfs;
    j["separate"] = ingest.separate;
  } else if (stage == "segment") {
    const SegmenterConfig& s = segment.segmenter;
    j["segmenter"] = {s.min_segment_s, s.max_segment_s, s.merge_gap_s, s.frame_ms,
                      s.hop_ms, s.hangover_ms, s.min_region_ms, s.energy_margin_db,
                      s.abs_floor_dbfs, s.max_noise_floor_dbfs};
    j["vad"] = segment.vad;
    j["diarize"] = segment.diarize;
    j["asr_model"] = segment.asr_model;
    j["min_chars_per_s"] = segment.min_chars_per_s;
    j["package_opus"] = segment.package_opus;
  } else if (stage == "score") {
    j["force"] = score.force;
    j["asr_model"] = score.asr_model;
    j["adapter_normalizer"] = score.adapter_normalizer;
  }
  return j.dump();
}

}  // namespace speechcurate
