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

#include "speechcurate/scorer_client.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "httplib.h"
#include "speechcurate/audio_codec.h"
#include "speechcurate/manifest_io.h"
#include "speechcurate/resample.h"
#include "speechcurate/text_normalizer.h"

namespace speechcurate {

using nlohmann::json;

namespace {

constexpr char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

AdapterError Unsupported(const char* endpoint) {
  return AdapterError(std::string("endpoint not supported by this client: ") +
                          endpoint,
                      "", false);
}

// Reads a number, accepting only finite values.
bool Finite(const json& v, double* out) {
  if (!v.is_number()) return false;
  *out = v.get<double>();
  return std::isfinite(*out);
}

}  // namespace

std::string Base64Encode(std::span<const uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kB64[v >> 18];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += kB64[v & 63];
  }
  if (i < bytes.size()) {
    uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kB64[v >> 18];
    out += kB64[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kB64[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<uint8_t> Base64Decode(std::string_view text) {
  int table[256];
  std::fill(std::begin(table), std::end(table), -1);
  for (int i = 0; i < 64; ++i) table[static_cast<uint8_t>(kB64[i])] = i;
  std::vector<uint8_t> out;
  uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    int v = table[static_cast<uint8_t>(c)];
    if (v < 0) throw ParseError("invalid base64 character");
    acc = (acc << 6) | static_cast<uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<uint8_t>((acc >> bits) & 0xff));
    }
  }
  return out;
}

// ---------------------------------------------------------------- base

std::string ScorerClient::Transcribe(const AudioRef&, const std::string&) {
  throw Unsupported("asr");
}
double ScorerClient::Dnsmos(const AudioRef&) { throw Unsupported("dnsmos"); }
std::vector<SpeechRegion> ScorerClient::Vad(const AudioRef&) {
  throw Unsupported("vad");
}
std::vector<float> ScorerClient::Embed(const AudioRef&) {
  throw Unsupported("embed");
}
std::string ScorerClient::Separate(const AudioRef&) {
  throw Unsupported("separate");
}
std::vector<DiarizationTurn> ScorerClient::Diarize(const AudioRef&) {
  throw Unsupported("diarize");
}
std::string ScorerClient::Normalize(const std::string&) {
  throw Unsupported("normalize");
}
std::map<std::string, EndpointHealth> ScorerClient::Health() { return {}; }

// ---------------------------------------------------------------- http

HttpScorerClient::HttpScorerClient(std::string base_url, HttpClientOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw ConfigError("adapter url is empty");
  if (options_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
}

json HttpScorerClient::AudioRequest(const std::string& kind, const AudioRef& audio,
                                    json options) {
  json a = json::object();
  if (!audio.uri.empty()) {
    a["uri"] = audio.uri;
  } else if (audio.audio) {
    const Waveform& w = *audio.audio;
    std::span<const float> s =
        audio.whole() ? std::span<const float>(w.samples) : w.Slice(audio.start_s, audio.end_s);
    std::vector<uint8_t> pcm(s.size() * 2);
    for (size_t i = 0; i < s.size(); ++i) {
      const float c = std::clamp(s[i], -1.0f, 1.0f);
      const int16_t v = static_cast<int16_t>(std::lrint(c * 32767.0f));
      pcm[2 * i] = static_cast<uint8_t>(v & 0xff);
      pcm[2 * i + 1] = static_cast<uint8_t>((v >> 8) & 0xff);
    }
    a["pcm16_b64"] = Base64Encode(pcm);
    a["sample_rate_hz"] = w.sample_rate_hz;
  } else {
    throw AdapterError("audio reference has neither uri nor samples",
                       audio.asset_id, false);
  }
  if (!audio.whole() && !audio.uri.empty()) {
    a["start_s"] = audio.start_s;
    a["end_s"] = audio.end_s;
  }
  json req = {{"request_id", kind + "-" + std::to_string(next_id_++)},
              {"kind", kind},
              {"audio", std::move(a)},
              {"options", options.is_null() ? json::object() : std::move(options)}};
  if (!audio.asset_id.empty()) req["asset_id"] = audio.asset_id;
  return req;
}

std::vector<json> HttpScorerClient::Post(const std::string& kind,
                                         const std::vector<json>& requests,
                                         const std::string& asset_id) {
  {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    HttpScorerClient* self;
    ~Release() {
      {
        std::lock_guard<std::mutex> lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};

  std::string body;
  for (const auto& r : requests) body += r.dump() + "\n";

  httplib::Client cli(base_url_);
  const auto secs = [](double s) {
    return std::chrono::microseconds(static_cast<int64_t>(s * 1e6));
  };
  cli.set_connection_timeout(secs(options_.connect_timeout_s));
  cli.set_read_timeout(secs(options_.read_timeout_s));
  cli.set_write_timeout(secs(options_.read_timeout_s));
  httplib::Headers headers = {{"X-Protocol-Version", kProtocolVersion}};
  auto res = cli.Post(("/" + kind).c_str(), headers, body, "application/x-ndjson");
  if (!res) {
    throw AdapterError("/" + kind + ": " + httplib::to_string(res.error()), asset_id);
  }
  if (res->status != 200) {
    std::string detail;
    try {
      json j = json::parse(res->body);
      if (j.contains("error") && j["error"].is_string()) detail = j["error"];
    } catch (const json::exception&) {
    }
    const bool retry = res->status >= 500 || res->status == 429;
    throw AdapterError("/" + kind + ": HTTP " + std::to_string(res->status) +
                           (detail.empty() ? "" : " (" + detail + ")"),
                       asset_id, retry);
  }
  if (res->has_header("X-Protocol-Version") &&
      res->get_header_value("X-Protocol-Version") != kProtocolVersion) {
    throw ProtocolError("/" + kind + ": protocol version " +
                            res->get_header_value("X-Protocol-Version"),
                        asset_id, false);
  }

  std::map<std::string, json> replies;
  for (const auto& line : SplitLines(res->body)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ProtocolError("/" + kind + ": malformed reply: " + e.what(), asset_id);
    }
    if (!j.is_object() || !j.contains("request_id") || !j["request_id"].is_string())
      throw ProtocolError("/" + kind + ": reply without request_id", asset_id);
    const std::string status = j.value("status", "");
    if (status == "error") {
      throw AdapterError("/" + kind + ": " + j.value("error", std::string("error")),
                         asset_id, j.value("retryable", false));
    }
    if (status != "ok" || !j.contains("result"))
      throw ProtocolError("/" + kind + ": reply without ok result", asset_id);
    replies[j["request_id"].get<std::string>()] = j["result"];
  }
  std::vector<json> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    auto it = replies.find(r["request_id"].get<std::string>());
    if (it == replies.end())
      throw ProtocolError("/" + kind + ": missing reply for " +
                              r["request_id"].get<std::string>(),
                          asset_id);
    out.push_back(std::move(it->second));
  }
  if (replies.size() != requests.size())
    throw ProtocolError("/" + kind + ": unexpected reply ids", asset_id);
  return out;
}

std::string HttpScorerClient::Transcribe(const AudioRef& audio,
                                         const std::string& model) {
  return TranscribeBatch({audio}, model).front();
}

std::vector<std::string> HttpScorerClient::TranscribeBatch(
    const std::vector<AudioRef>& audio, const std::string& model) {
  if (audio.empty()) return {};
  std::vector<json> reqs;
  for (const auto& a : audio) reqs.push_back(AudioRequest("asr", a, {{"model", model}}));
  std::vector<json> results = Post("asr", reqs, audio.front().asset_id);
  std::vector<std::string> out;
  for (size_t i = 0; i < results.size(); ++i) {
    if (!results[i].is_string())
      throw ProtocolError("/asr: result is not a transcript string", audio[i].asset_id);
    out.push_back(results[i].get<std::string>());
  }
  return out;
}

double HttpScorerClient::Dnsmos(const AudioRef& audio) {
  json r = Post("dnsmos", {AudioRequest("dnsmos", audio, {})}, audio.asset_id).front();
  double v;
  if (!Finite(r, &v)) throw ProtocolError("/dnsmos: result is not a number", audio.asset_id);
  if (v < 1.0 || v > 5.0)
    throw ProtocolError("/dnsmos: score " + ShortestReal(v) + " outside [1, 5]",
                        audio.asset_id);
  return v;
}

std::vector<SpeechRegion> HttpScorerClient::Vad(const AudioRef& audio) {
  json r = Post("vad", {AudioRequest("vad", audio, {})}, audio.asset_id).front();
  if (!r.is_array()) throw ProtocolError("/vad: result is not a list", audio.asset_id);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  if (!audio.whole()) {
    lo = audio.start_s;
    hi = audio.end_s;
  } else if (audio.audio) {
    hi = audio.audio->duration_s();
  }
  std::vector<std::pair<double, double>> turns;
  for (const auto& p : r) {
    double s, e;
    if (!p.is_array() || p.size() != 2 || !Finite(p[0], &s) || !Finite(p[1], &e) ||
        !(s < e))
      throw ProtocolError("/vad: malformed (start_s, end_s) pair", audio.asset_id);
    if (s < lo - 1e-3 || e > hi + 1e-3)
      throw ProtocolError("/vad: region outside the audio", audio.asset_id);
    turns.emplace_back(s, e);
  }
  return ImportExternalVad(std::move(turns));
}

std::vector<float> HttpScorerClient::Embed(const AudioRef& audio) {
  json r = Post("embed", {AudioRequest("embed", audio, {})}, audio.asset_id).front();
  if (!r.is_array() || r.empty())
    throw ProtocolError("/embed: result is not a non-empty vector", audio.asset_id);
  std::vector<float> out;
  out.reserve(r.size());
  for (const auto& v : r) {
    double x;
    if (!Finite(v, &x)) throw ProtocolError("/embed: non-finite component", audio.asset_id);
    out.push_back(static_cast<float>(x));
  }
  return out;
}

std::string HttpScorerClient::Separate(const AudioRef& audio) {
  json r = Post("separate", {AudioRequest("separate", audio, {})}, audio.asset_id).front();
  if (r.is_object() && r.contains("uri")) r = r["uri"];
  if (!r.is_string() || r.get<std::string>().empty())
    throw ProtocolError("/separate: result is not an audio reference", audio.asset_id);
  return r.get<std::string>();
}

std::vector<DiarizationTurn> HttpScorerClient::Diarize(const AudioRef& audio) {
  json r = Post("diarize", {AudioRequest("diarize", audio, {})}, audio.asset_id).front();
  if (!r.is_array()) throw ProtocolError("/diarize: result is not a list", audio.asset_id);
  std::vector<DiarizationTurn> out;
  for (const auto& t : r) {
    DiarizationTurn turn;
    if (!t.is_object() || !t.contains("start_s") || !t.contains("end_s") ||
        !Finite(t["start_s"], &turn.start_s) || !Finite(t["end_s"], &turn.end_s) ||
        !(turn.start_s < turn.end_s) || !t.contains("speaker") ||
        !t["speaker"].is_string())
      throw ProtocolError("/diarize: malformed turn", audio.asset_id);
    turn.speaker_label = t["speaker"].get<std::string>();
    out.push_back(std::move(turn));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.start_s, a.end_s, a.speaker_label) <
           std::tie(b.start_s, b.end_s, b.speaker_label);
  });
  return out;
}

std::string HttpScorerClient::Normalize(const std::string& text) {
  json req = {{"request_id", "normalize-" + std::to_string(next_id_++)},
              {"kind", "normalize"},
              {"text", text},
              {"options", json::object()}};
  json r = Post("normalize", {req}, "").front();
  if (!r.is_string()) throw ProtocolError("/normalize: result is not a string", "");
  return r.get<std::string>();
}

std::map<std::string, EndpointHealth> HttpScorerClient::Health() {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(std::chrono::microseconds(
      static_cast<int64_t>(options_.connect_timeout_s * 1e6)));
  auto res = cli.Get("/health", {{"X-Protocol-Version", kProtocolVersion}});
  if (!res) throw AdapterError("/health: " + httplib::to_string(res.error()), "");
  if (res->status != 200)
    throw AdapterError("/health: HTTP " + std::to_string(res->status), "");
  json j;
  try {
    j = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("/health: malformed reply: ") + e.what(), "");
  }
  if (!j.is_object() || !j.contains("endpoints") || !j["endpoints"].is_object())
    throw ProtocolError("/health: reply without endpoint map", "");
  std::map<std::string, EndpointHealth> out;
  for (const auto& [name, v] : j["endpoints"].items()) {
    if (!v.is_object() || !v.contains("available") || !v["available"].is_boolean())
      throw ProtocolError("/health: malformed entry for " + name, "");
    out[name] = {v["available"].get<bool>(), v.value("model", std::string())};
  }
  return out;
}

// ---------------------------------------------------------------- stub

StubScorerClient::StubScorerClient(std::filesystem::path stub_words,
                                   SegmenterConfig vad_config)
    : vad_config_(vad_config) {
  if (stub_words.empty()) return;
  if (!std::filesystem::exists(stub_words))
    throw ConfigError("stub words file not found: " + stub_words.string());
  auto rows = ReadLines(stub_words, [](std::string_view line, size_t n) {
    FieldReader f(line, n);
    f.RejectUnknown({"asset_id", "start_s", "end_s", "word", "model"});
    return std::make_pair(f.Str("asset_id"),
                          StubWord{f.Real("start_s"), f.Real("end_s"), f.Str("word"),
                                   f.OptStr("model").value_or("")});
  });
  for (auto& [asset, w] : rows) words_[asset].push_back(std::move(w));
  for (auto& [asset, list] : words_) {
    std::stable_sort(list.begin(), list.end(),
                     [](const StubWord& a, const StubWord& b) { return a.start_s < b.start_s; });
  }
}

std::shared_ptr<const Waveform> StubScorerClient::Load(const AudioRef& audio) {
  if (audio.audio) return audio.audio;
  if (audio.uri.empty())
    throw AdapterError("audio reference has neither uri nor samples", audio.asset_id,
                       false);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(audio.uri);
    if (it != cache_.end()) return it->second;
  }
  Waveform w;
  try {
    w = Downmix(DecodeAudioFile(audio.uri));
  } catch (const Error& e) {
    throw AdapterError(e.what(), audio.asset_id, false);
  }
  if (w.sample_rate_hz != kStandardSampleRate) {
    w.samples = Resample(w.samples, w.sample_rate_hz, kStandardSampleRate);
    w.sample_rate_hz = kStandardSampleRate;
  }
  auto ptr = std::make_shared<const Waveform>(std::move(w));
  std::lock_guard<std::mutex> lock(mu_);
  // Workers walk assets in order, so a small cache is enough.
  if (cache_.size() >= 4) cache_.clear();
  cache_.emplace(audio.uri, ptr);
  return ptr;
}

std::span<const float> StubScorerClient::Window(
    const AudioRef& audio, std::shared_ptr<const Waveform>* holder) {
  *holder = Load(audio);
  const Waveform& w = **holder;
  if (w.channels != 1)
    throw AdapterError("stub adapters need mono audio", audio.asset_id, false);
  return audio.whole() ? std::span<const float>(w.samples)
                       : w.Slice(audio.start_s, audio.end_s);
}

std::string StubScorerClient::Transcribe(const AudioRef& audio,
                                         const std::string& model) {
  auto it = words_.find(audio.asset_id);
  if (it == words_.end()) return "";
  std::string out;
  for (const auto& w : it->second) {
    const double mid = 0.5 * (w.start_s + w.end_s);
    if (!audio.whole() && (mid < audio.start_s || mid >= audio.end_s)) continue;
    if (!w.model.empty() && w.model != model) continue;
    if (!out.empty()) out += ' ';
    out += w.word;
  }
  return out;
}

double StubScorerClient::Dnsmos(const AudioRef& audio) {
  std::shared_ptr<const Waveform> holder;
  std::span<const float> s = Window(audio, &holder);
  std::vector<double> e = FrameEnergiesDb(s, kStandardSampleRate, 25, 10);
  if (e.size() < 2) return 1.0;
  std::sort(e.begin(), e.end());
  const double p10 = e[(e.size() - 1) / 10];
  const double p90 = e[(e.size() - 1) * 9 / 10];
  return 1.0 + 4.0 * std::clamp((p90 - p10) / 40.0, 0.0, 1.0);
}

std::vector<SpeechRegion> StubScorerClient::Vad(const AudioRef& audio) {
  std::shared_ptr<const Waveform> holder;
  std::span<const float> s = Window(audio, &holder);
  std::vector<SpeechRegion> r = DetectSpeechFrames(s, kStandardSampleRate, vad_config_);
  if (!audio.whole()) {
    for (auto& x : r) {
      x.start_s = RoundToMillis(x.start_s + audio.start_s);
      x.end_s = RoundToMillis(x.end_s + audio.start_s);
    }
  }
  return r;
}

std::vector<float> StubScorerClient::Embed(const AudioRef& audio) {
  std::shared_ptr<const Waveform> holder;
  std::span<const float> s = Window(audio, &holder);
  // Repeated differencing tilts the spectrum upwards, repeated two-tap
  // averaging downwards; their energies form a coarse spectral profile.
  constexpr int kBands = 8;
  std::vector<float> out(kBands);
  std::vector<double> hi(s.begin(), s.end());
  std::vector<double> lo = hi;
  for (int b = 0; b < kBands / 2; ++b) {
    double eh = 0.0, el = 0.0;
    for (double v : hi) eh += v * v;
    for (double v : lo) el += v * v;
    const double n = std::max<size_t>(hi.size(), 1);
    out[b] = static_cast<float>(std::log10(eh / n + 1e-10) + 10.0);
    out[kBands - 1 - b] = static_cast<float>(std::log10(el / n + 1e-10) + 10.0);
    for (size_t i = hi.size(); i-- > 1;) {
      hi[i] -= hi[i - 1];
      lo[i] = 0.5 * (lo[i] + lo[i - 1]);
    }
  }
  double norm = 0.0;
  for (float v : out) norm += static_cast<double>(v) * v;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (float& v : out) v = static_cast<float>(v / norm);
  return out;
}

std::string StubScorerClient::Separate(const AudioRef& audio) { return audio.uri; }

std::vector<DiarizationTurn> StubScorerClient::Diarize(const AudioRef& audio) {
  if (!audio.whole()) return {{audio.start_s, audio.end_s, "spk0"}};
  const double end = RoundToMillis(Load(audio)->duration_s());
  if (end <= 0.0) return {};
  return {{0.0, end, "spk0"}};
}

std::string StubScorerClient::Normalize(const std::string& text) {
  return JoinTokens(NormalizeText(text));
}

std::map<std::string, EndpointHealth> StubScorerClient::Health() {
  std::map<std::string, EndpointHealth> out;
  for (const char* e : {"asr", "dnsmos", "vad", "embed", "separate", "diarize", "normalize"})
    out[e] = {true, "stub"};
  return out;
}

// ---------------------------------------------------------------- counting

std::string CountingClient::Transcribe(const AudioRef& a, const std::string& m) {
  ++calls_;
  return inner_->Transcribe(a, m);
}
double CountingClient::Dnsmos(const AudioRef& a) {
  ++calls_;
  return inner_->Dnsmos(a);
}
std::vector<SpeechRegion> CountingClient::Vad(const AudioRef& a) {
  ++calls_;
  return inner_->Vad(a);
}
std::vector<float> CountingClient::Embed(const AudioRef& a) {
  ++calls_;
  return inner_->Embed(a);
}
std::string CountingClient::Separate(const AudioRef& a) {
  ++calls_;
  return inner_->Separate(a);
}
std::vector<DiarizationTurn> CountingClient::Diarize(const AudioRef& a) {
  ++calls_;
  return inner_->Diarize(a);
}
std::string CountingClient::Normalize(const std::string& text) {
  ++calls_;
  return inner_->Normalize(text);
}
std::map<std::string, EndpointHealth> CountingClient::Health() {
  ++calls_;
  return inner_->Health();
}

}  // namespace speechcurate
