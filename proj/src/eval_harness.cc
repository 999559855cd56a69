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

#include "speechcurate/eval_harness.h"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "json.hpp"
#include "speechcurate/manifest_io.h"
#include "speechcurate/quality_filter.h"
#include "speechcurate/wer.h"

namespace speechcurate {
namespace {

std::unordered_map<std::string, const GenerationRecord*> ByPair(
    const std::vector<GenerationRecord>& generations) {
  std::unordered_map<std::string, const GenerationRecord*> out;
  for (const auto& g : generations) {
    if (!out.emplace(g.pair_id, &g).second)
      throw ValidationError("two generations for pair '" + g.pair_id + "'");
  }
  return out;
}

AudioRef GeneratedRef(const GenerationRecord& g) {
  AudioRef r;
  r.uri = g.uri;
  r.asset_id = g.pair_id;
  return r;
}

}  // namespace

ObjectiveResult PrepareResult(const std::vector<GenerationRecord>& generations,
                              const std::vector<PromptPair>& benchmark) {
  const auto gens = ByPair(generations);
  ObjectiveResult out;
  if (!generations.empty()) out.model_name = generations.front().model_name;
  for (const auto& p : benchmark) {
    SampleResult s;
    s.pair_id = p.pair_id;
    s.category = p.category;
    s.missing = !gens.count(p.pair_id);
    if (s.missing) ++out.missing;
    out.samples.push_back(std::move(s));
  }
  return out;
}

void EvalWer(ObjectiveResult* result, const std::vector<GenerationRecord>& generations,
             const std::vector<PromptPair>& benchmark, ScorerClient& asr,
             const EvalOptions& options) {
  const auto gens = ByPair(generations);
  for (size_t i = 0; i < benchmark.size(); ++i) {
    SampleResult& s = result->samples.at(i);
    if (s.missing) continue;
    const GenerationRecord& g = *gens.at(s.pair_id);
    try {
      const std::string hyp = asr.Transcribe(GeneratedRef(g), options.asr_model);
      const std::string& ref = benchmark[i].target_text;
      const double wer =
          options.adapter_normalizer
              ? WordErrorRate(SplitWhitespace(asr.Normalize(ref)),
                              SplitWhitespace(asr.Normalize(hyp)))
                    .rate
              : WerOfStrings(ref, hyp);
      s.wer = wer;
      s.wer_excluded = wer > kHallucinationWer;
    } catch (const AdapterError& e) {
      s.error = std::string("asr: ") + e.what();
    } catch (const UndefinedRateError&) {
      s.error = "wer: empty target text";
    }
  }
}

double CosineSimilarity(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size() || a.empty()) return std::numeric_limits<double>::quiet_NaN();
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

void EvalSim(ObjectiveResult* result, const std::vector<GenerationRecord>& generations,
             const std::vector<PromptPair>& benchmark, ScorerClient& embedder) {
  const auto gens = ByPair(generations);
  for (size_t i = 0; i < benchmark.size(); ++i) {
    SampleResult& s = result->samples.at(i);
    if (s.missing) continue;
    const PromptPair& p = benchmark[i];
    AudioRef prompt;
    prompt.uri = p.prompt_uri;
    prompt.asset_id = p.prompt_segment_id;
    prompt.start_s = p.prompt_start_s;
    prompt.end_s = p.prompt_end_s;
    try {
      const double c = CosineSimilarity(embedder.Embed(prompt),
                                        embedder.Embed(GeneratedRef(*gens.at(s.pair_id))));
      if (std::isnan(c)) {
        s.sim_invalid = true;
      } else {
        s.sim = c;
      }
    } catch (const AdapterError& e) {
      s.error = std::string("embed: ") + e.what();
    }
  }
}

void EvalDnsmos(ObjectiveResult* result,
                const std::vector<GenerationRecord>& generations, ScorerClient& dnsmos) {
  const auto gens = ByPair(generations);
  for (SampleResult& s : result->samples) {
    if (s.missing) continue;
    const double v = dnsmos.Dnsmos(GeneratedRef(*gens.at(s.pair_id)));
    if (!(v >= 1.0 && v <= 5.0))
      throw ProtocolError("dnsmos score " + ShortestReal(v) + " outside [1, 5]", s.pair_id,
                          false);
    s.dnsmos = v;
  }
}

ObjectiveResult EvaluateModel(const std::vector<GenerationRecord>& generations,
                              const std::vector<PromptPair>& benchmark,
                              ScorerClient& adapter, const EvalOptions& options) {
  ObjectiveResult r = PrepareResult(generations, benchmark);
  EvalWer(&r, generations, benchmark, adapter, options);
  EvalSim(&r, generations, benchmark, adapter);
  EvalDnsmos(&r, generations, adapter);
  return r;
}

const char* EvalMetricName(EvalMetric metric) {
  switch (metric) {
    case EvalMetric::kWer: return "WER";
    case EvalMetric::kSim: return "SIM";
    case EvalMetric::kDnsmos: return "DNSMOS";
  }
  return "?";
}

CategoryTable AggregateByCategory(const ObjectiveResult& result, EvalMetric metric) {
  struct Sum {
    double total = 0.0;
    int64_t n = 0;
    int64_t excluded = 0;
  };
  std::map<Category, Sum> sums;
  Sum all;
  for (const auto& s : result.samples) {
    Sum& c = sums[s.category];
    std::optional<double> v;
    bool excluded = false;
    switch (metric) {
      case EvalMetric::kWer:
        excluded = s.wer_excluded;
        if (s.wer && !excluded) v = 100.0 * *s.wer;
        break;
      case EvalMetric::kSim:
        excluded = s.sim_invalid;
        v = s.sim;
        break;
      case EvalMetric::kDnsmos:
        v = s.dnsmos;
        break;
    }
    if (excluded) {
      ++c.excluded;
      ++all.excluded;
    }
    if (!v) continue;
    c.total += *v;
    ++c.n;
    all.total += *v;
    ++all.n;
  }
  CategoryTable out;
  out.metric = metric;
  auto finish = [](const Sum& s) {
    MetricAggregate a;
    a.count = s.n;
    a.excluded = s.excluded;
    if (s.n > 0) a.mean = s.total / static_cast<double>(s.n);
    return a;
  };
  for (const auto& [cat, s] : sums) out.categories[cat] = finish(s);
  out.overall = finish(all);
  return out;
}

ModelRanking RankModels(const std::vector<std::string>& models,
                        const std::vector<MetricColumn>& metrics) {
  if (models.size() < 2) throw ValidationError("ranking needs at least two models");
  if (metrics.empty()) throw ValidationError("ranking needs at least one metric");
  ModelRanking out;
  out.models = models;
  out.average_rank.assign(models.size(), 0.0);
  const double n = static_cast<double>(models.size());
  for (const auto& m : metrics) {
    if (m.values.size() != models.size())
      throw ValidationError("metric '" + m.name + "' does not cover every model");
    std::vector<double> v;
    for (size_t i = 0; i < models.size(); ++i) {
      if (!m.values[i] || !std::isfinite(*m.values[i]))
        throw ValidationError("model '" + models[i] + "' has no value for '" + m.name + "'");
      v.push_back(*m.values[i]);
    }
    // QualityRanks puts the worst first; flip so 1 is the best.
    std::vector<double> r = QualityRanks(v, !m.lower_is_better);
    for (double& x : r) x = n + 1.0 - x;
    for (size_t i = 0; i < r.size(); ++i) out.average_rank[i] += r[i];
    out.ranks.push_back(std::move(r));
  }
  for (double& a : out.average_rank) a /= static_cast<double>(metrics.size());
  return out;
}

namespace {

bool IsAudioExtension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  static const char* const kExt[] = {".wav", ".flac", ".opus", ".ogg", ".mp3", ".m4a"};
  return std::find(std::begin(kExt), std::end(kExt), ext) != std::end(kExt);
}

}  // namespace

std::vector<GenerationRecord> ScanGenerations(const std::filesystem::path& dir,
                                              std::string* model_name) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::string model = dir.filename().string();
  const fs::path run = dir / "run.json";
  if (fs::exists(run)) {
    try {
      auto j = nlohmann::json::parse(ReadFile(run));
      model = j.value("model_name", model);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(run.string() + ": " + e.what());
    }
  }
  std::vector<GenerationRecord> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !IsAudioExtension(entry.path())) continue;
    out.push_back({entry.path().stem().string(), model, entry.path().string()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.pair_id < b.pair_id;
  });
  if (model_name) *model_name = model;
  return out;
}

std::string EncodeSampleResult(const SampleResult& s, const std::string& model) {
  LineBuilder b;
  b.Str("pair_id", s.pair_id).Str("model", model).Str("category", CategoryName(s.category));
  b.Bool("missing", s.missing);
  if (s.wer) b.Real("wer", *s.wer);
  b.Bool("wer_excluded", s.wer_excluded);
  if (s.sim) b.Real("sim", *s.sim);
  b.Bool("sim_invalid", s.sim_invalid);
  if (s.dnsmos) b.Real("dnsmos", *s.dnsmos);
  if (!s.error.empty()) b.Str("error", s.error);
  return b.Finish();
}

SampleResult DecodeSampleResult(std::string_view line, size_t line_number,
                                std::string* model) {
  FieldReader f(line, line_number);
  f.RejectUnknown({"pair_id", "model", "category", "missing", "wer", "wer_excluded",
                   "sim", "sim_invalid", "dnsmos", "error"});
  SampleResult s;
  s.pair_id = f.Str("pair_id");
  if (model) *model = f.Str("model");
  try {
    s.category = ParseCategory(f.Str("category"));
  } catch (const ParseError& e) {
    f.Fail("category", e.what());
  }
  s.missing = f.Bool("missing");
  s.wer = f.OptReal("wer");
  s.wer_excluded = f.Bool("wer_excluded");
  s.sim = f.OptReal("sim");
  s.sim_invalid = f.Bool("sim_invalid");
  s.dnsmos = f.OptReal("dnsmos");
  s.error = f.OptStr("error").value_or("");
  return s;
}

}  // namespace speechcurate
