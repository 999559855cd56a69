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

#include "speechcurate/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "speechcurate/audio_codec.h"
#include "speechcurate/manifest_io.h"
#include "speechcurate/text_normalizer.h"

namespace speechcurate {
namespace {

constexpr const char* kVocabulary[] = {
    "the", "river", "morning", "quiet", "garden", "window", "letter", "travel",
    "silver", "market", "yellow", "winter", "summer", "people", "music", "history",
    "simple", "orange", "forest", "station", "picture", "number", "paper", "island",
    "little", "bright", "answer", "moment", "coffee", "doctor", "family", "village",
    "mountain", "journey", "evening", "kitchen", "science", "promise", "thunder",
    "blanket", "candle", "harbor", "meadow", "pencil", "rocket", "shadow", "ticket",
    "velvet", "wonder", "anchor"};
constexpr size_t kVocabularySize = sizeof(kVocabulary) / sizeof(kVocabulary[0]);

std::string RandomSentence(Rng& rng, int min_words, int max_words) {
  const int n = min_words + static_cast<int>(rng.UniformIndex(max_words - min_words + 1));
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kVocabulary[rng.UniformIndex(kVocabularySize)];
  }
  return s;
}

double Uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.UniformReal(); }

std::string Pad(int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, value);
  return buf;
}

std::string StubWordLine(const std::string& asset_id, double s, double e,
                         const std::string& word, const std::string& model) {
  LineBuilder b;
  b.Str("asset_id", asset_id).Fixed("start_s", s, 3).Fixed("end_s", e, 3).Str("word", word);
  if (!model.empty()) b.Str("model", model);
  return b.Finish();
}

}  // namespace

PlantedLayout RandomLayout(Rng& rng, double duration_s, const LayoutOptions& o) {
  PlantedLayout layout;
  layout.duration_s = duration_s;
  double t = o.lead_s;
  while (t < duration_s - 0.6) {
    const double end = std::min(t + Uniform(rng, o.min_burst_s, o.max_burst_s), duration_s - 0.3);
    if (end - t >= 0.3) layout.speech.push_back({RoundToMillis(t), RoundToMillis(end)});
    t = end + Uniform(rng, o.min_gap_s, o.max_gap_s);
  }
  return layout;
}

Waveform RenderLayout(const PlantedLayout& layout, int sample_rate_hz, int channels,
                      double speech_dbfs, double noise_dbfs, Rng& rng) {
  const size_t n = static_cast<size_t>(std::llround(layout.duration_s * sample_rate_hz));
  std::vector<float> mono(n, 0.0f);
  const double noise_rms = std::pow(10.0, noise_dbfs / 20.0);
  for (auto& v : mono) v = static_cast<float>(noise_rms * rng.Normal());

  const double target = std::pow(10.0, speech_dbfs / 20.0);
  const double kPi = 3.14159265358979323846;
  const double a_lo = 1.0 - std::exp(-2.0 * kPi * 3400.0 / sample_rate_hz);
  const double a_hi = 1.0 - std::exp(-2.0 * kPi * 300.0 / sample_rate_hz);
  for (const auto& r : layout.speech) {
    const size_t a = static_cast<size_t>(std::llround(r.start_s * sample_rate_hz));
    const size_t b = std::min(n, static_cast<size_t>(std::llround(r.end_s * sample_rate_hz)));
    if (b <= a) continue;
    std::vector<double> burst(b - a);
    double lp = 0.0, slow = 0.0, ss = 0.0;
    for (auto& x : burst) {
      lp += a_lo * (rng.Normal() - lp);
      slow += a_hi * (lp - slow);
      x = lp - slow;
      ss += x * x;
    }
    const double rms = std::sqrt(ss / static_cast<double>(burst.size()));
    const double phase = 2.0 * kPi * rng.UniformReal();
    for (size_t i = 0; i < burst.size(); ++i) {
      const double t = static_cast<double>(i) / sample_rate_hz;
      const double env = 0.7 + 0.3 * std::sin(2.0 * kPi * 3.5 * t + phase);
      mono[a + i] += static_cast<float>(burst[i] / std::max(rms, 1e-12) * target * env);
    }
  }
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.channels = channels;
  w.samples.resize(n * static_cast<size_t>(channels));
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < channels; ++c)
      w.samples[i * static_cast<size_t>(channels) + static_cast<size_t>(c)] =
          std::clamp(mono[i], -1.0f, 1.0f);
  return w;
}

double PlantedRatio(const PlantedLayout& layout, double start_s, double end_s) {
  return SpeechRatio(start_s, end_s, layout.speech);
}

SynthCorpus WriteSynthCorpus(const SynthCorpusOptions& o) {
  namespace fs = std::filesystem;
  if (o.datasets.empty()) throw ConfigError("synth: no datasets");
  fs::create_directories(o.out_dir / "audio");
  SynthCorpus out;
  out.assets_path = o.out_dir / "assets.jsonl";
  out.stub_words_path = o.out_dir / "stub_words.jsonl";
  out.config_path = o.out_dir / "config.json";

  Rng rng(o.seed);
  std::string assets, words;
  for (int i = 0; i < o.assets; ++i) {
    const SynthDataset& ds = o.datasets[static_cast<size_t>(i) % o.datasets.size()];
    AudioAsset a;
    a.asset_id = "rec" + Pad(i, 4);
    a.source_dataset = ds.name;
    a.sub_split = ds.sub_split;
    a.language = "en";
    a.license = "CC-BY-4.0";
    const bool hi_rate = i % 2 == 1;
    a.sample_rate_hz = hi_rate ? 48000 : 16000;
    a.channels = hi_rate ? 2 : 1;
    const double duration = RoundToMillis(Uniform(rng, o.min_asset_s, o.max_asset_s));
    PlantedLayout layout = RandomLayout(rng, duration);
    Waveform w = RenderLayout(layout, a.sample_rate_hz, a.channels, -22.0, ds.noise_dbfs, rng);
    const fs::path wav = fs::absolute(o.out_dir / "audio" / (a.asset_id + ".wav"));
    WriteWav(wav, w);
    a.uri = wav.lexically_normal().string();
    a.duration_s = w.duration_s();
    assets += EncodeAsset(a) + "\n";

    for (const auto& r : layout.speech) {
      const bool mismatch = rng.UniformReal() < o.mismatch_fraction;
      for (double t = r.start_s + 0.05; t + 0.35 <= r.end_s; t += 0.4) {
        const std::string word = kVocabulary[rng.UniformIndex(kVocabularySize)];
        std::string model;
        if (mismatch && rng.UniformReal() < 0.35) model = o.reference_model;
        words += StubWordLine(a.asset_id, t, t + 0.35, word, model) + "\n";
        if (mismatch && rng.UniformReal() < 0.15)
          words += StubWordLine(a.asset_id, t + 0.1, t + 0.3,
                                kVocabulary[rng.UniformIndex(kVocabularySize)],
                                o.scoring_model) + "\n";
      }
    }
    out.layouts.emplace(a.asset_id, std::move(layout));
  }
  WriteFileAtomic(out.assets_path, assets);
  WriteFileAtomic(out.stub_words_path, words);

  nlohmann::ordered_json cfg;
  cfg["work_dir"] = "work";
  cfg["shards"] = 3;
  cfg["workers"] = 2;
  cfg["seed"] = o.seed;
  cfg["adapters"] = {{"stub", true}, {"stub_words", "stub_words.jsonl"}};
  cfg["ingest"] = {{"input", "assets.jsonl"}};
  cfg["filter"] = {{"mode", "combined"}, {"removal_percentile", 15}};
  WriteFileAtomic(out.config_path, cfg.dump(2) + "\n");
  return out;
}

std::map<std::string, DatasetManifest> SynthBenchmarkManifests(
    const BenchmarkConfig& config, int64_t per_dataset, uint64_t seed, int speakers) {
  std::map<std::string, DatasetManifest> out;
  static const char* kEmotions[] = {"neutral", "happy", "sad", "angry", "surprised"};
  for (const auto& cat : config.categories) {
    for (const auto& name : cat.datasets) {
      Rng rng(DeriveSeed(seed, name));
      DatasetManifest m(name);
      const bool expressive = cat.category == Category::kExpressive;
      // One expressive set without speaker labels exercises the emotion key.
      const bool no_speakers = name.find("EmoV") != std::string::npos;
      for (int64_t i = 0; i < per_dataset; ++i) {
        const std::string id = name + "-" + Pad(static_cast<int>(i), 5);
        AudioAsset a;
        a.asset_id = id;
        a.source_dataset = name;
        a.uri = "synthetic/" + name + "/" + id + ".wav";
        a.duration_s = 12.0;
        a.license = "synthetic";
        m.AddAsset(a);
        SegmentRecord r;
        r.segment_id = id;
        r.asset_id = id;
        r.start_s = 0.5;
        r.end_s = RoundToMillis(Uniform(rng, 3.5, 11.0));
        r.text = RandomSentence(rng, 5, 14);
        // Skewed speaker sizes so quotas are not trivially equal.
        if (!no_speakers) {
          const double u = rng.UniformReal();
          r.speaker_id = "spk" + Pad(static_cast<int>(u * u * speakers), 2);
        }
        if (expressive) r.tags["emotion"] = kEmotions[rng.UniformIndex(5)];
        m.AddRecord(std::move(r));
      }
      m.Canonicalize();
      out.emplace(name, std::move(m));
    }
  }
  return out;
}

std::filesystem::path WriteSynthBenchmarkInputs(const std::filesystem::path& out_dir,
                                                int64_t per_dataset, uint64_t seed) {
  namespace fs = std::filesystem;
  const BenchmarkConfig ref = BenchmarkConfig::Reference();
  auto manifests = SynthBenchmarkManifests(ref, per_dataset, seed);
  fs::create_directories(out_dir / "datasets");
  nlohmann::ordered_json paths = nlohmann::ordered_json::object();
  std::string words;
  for (const auto& [name, m] : manifests) {
    const fs::path p = out_dir / "datasets" / (name + ".jsonl");
    WriteManifest(m, p);
    paths[name] = fs::path("datasets") / (name + ".jsonl");
    if (!ref.zero_wer_datasets.count(name)) continue;
    // Four in five segments transcribe exactly; the rest gain a filler word.
    int k = 0;
    for (const auto& r : m.records()) {
      TokenSequence tokens = NormalizeText(r.text);
      if (k++ % 5 == 0) tokens.insert(tokens.begin(), "uh");
      const double step = (r.end_s - r.start_s) / static_cast<double>(tokens.size());
      for (size_t i = 0; i < tokens.size(); ++i) {
        const double s = r.start_s + step * static_cast<double>(i);
        words += StubWordLine(r.asset_id, s, s + 0.8 * step, tokens[i], "") + "\n";
      }
    }
  }
  WriteFileAtomic(out_dir / "bench_stub_words.jsonl", words);
  nlohmann::ordered_json cfg;
  cfg["work_dir"] = "work";
  cfg["seed"] = seed;
  cfg["adapters"] = {{"stub", true}, {"stub_words", "bench_stub_words.jsonl"}};
  cfg["build_eval"] = {{"manifests", paths}, {"output", "work/benchmark.jsonl"}};
  const fs::path config = out_dir / "bench_config.json";
  WriteFileAtomic(config, cfg.dump(2) + "\n");
  return config;
}

}  // namespace speechcurate
