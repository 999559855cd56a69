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

#ifndef SPEECHCURATE_SCORER_CLIENT_H_
#define SPEECHCURATE_SCORER_CLIENT_H_

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "speechcurate/audio.h"
#include "speechcurate/segmentation.h"
#include "speechcurate/util.h"

namespace speechcurate {

// Wire protocol version sent in the X-Protocol-Version header.
inline constexpr const char* kProtocolVersion = "1";

// Failure talking to a model adapter. Carries the asset being processed so
// callers can record or retry per asset.
class AdapterError : public Error {
 public:
  AdapterError(const std::string& what, std::string asset_id,
               bool retryable = true)
      : Error(what), asset_id_(std::move(asset_id)), retryable_(retryable) {}
  const std::string& asset_id() const { return asset_id_; }
  bool retryable() const { return retryable_; }

 private:
  std::string asset_id_;
  bool retryable_;
};

// The adapter answered, but the reply breaks the protocol: bad JSON, wrong
// result kind or an out-of-range value.
class ProtocolError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

// Audio handed to an adapter. `uri` is a shared-filesystem reference; when
// it is empty the samples in `audio` are sent inline. A zero-length window
// (start_s == end_s == 0) means the whole file.
struct AudioRef {
  std::string uri;
  std::string asset_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::shared_ptr<const Waveform> audio;

  bool whole() const { return start_s == 0.0 && end_s == 0.0; }
};

struct DiarizationTurn {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string speaker_label;
  bool operator==(const DiarizationTurn&) const = default;
};

struct EndpointHealth {
  bool available = false;
  std::string model;
};

// Endpoints of the scorer service. Default implementations throw a
// non-retryable AdapterError, so test mocks override only what they need.
class ScorerClient {
 public:
  virtual ~ScorerClient() = default;

  virtual std::string Transcribe(const AudioRef& audio, const std::string& model);
  // Scalar in [1, 5].
  virtual double Dnsmos(const AudioRef& audio);
  // Speech regions in asset time, sorted and non-overlapping.
  virtual std::vector<SpeechRegion> Vad(const AudioRef& audio);
  virtual std::vector<float> Embed(const AudioRef& audio);
  // Returns the uri of the separated (vocals) audio.
  virtual std::string Separate(const AudioRef& audio);
  virtual std::vector<DiarizationTurn> Diarize(const AudioRef& audio);
  virtual std::string Normalize(const std::string& text);
  virtual std::map<std::string, EndpointHealth> Health();
};

struct HttpClientOptions {
  double connect_timeout_s = 5.0;
  double read_timeout_s = 120.0;
  // Bound on concurrent requests issued through one client.
  int max_in_flight = 4;
};

// Client for the HTTP scorer service. Every call is one POST whose body is
// a JSON line {"request_id", "kind", "audio"|"text", "options"}; the reply
// is a JSON line {"request_id", "status", "result", "model", "version"}.
// Batch calls send several request lines in one body and expect one reply
// line per request, in any order. Safe to share between threads.
class HttpScorerClient : public ScorerClient {
 public:
  explicit HttpScorerClient(std::string base_url, HttpClientOptions options = {});

  std::string Transcribe(const AudioRef& audio, const std::string& model) override;
  double Dnsmos(const AudioRef& audio) override;
  std::vector<SpeechRegion> Vad(const AudioRef& audio) override;
  std::vector<float> Embed(const AudioRef& audio) override;
  std::string Separate(const AudioRef& audio) override;
  std::vector<DiarizationTurn> Diarize(const AudioRef& audio) override;
  std::string Normalize(const std::string& text) override;
  std::map<std::string, EndpointHealth> Health() override;

  // Batch envelope for the ASR endpoint; results follow the input order.
  std::vector<std::string> TranscribeBatch(const std::vector<AudioRef>& audio,
                                           const std::string& model);

  const std::string& base_url() const { return base_url_; }

 private:
  // Posts request lines to /<kind> and returns the "result" of each reply,
  // matched to the requests by request_id.
  std::vector<nlohmann::json> Post(const std::string& kind,
                                   const std::vector<nlohmann::json>& requests,
                                   const std::string& asset_id);
  nlohmann::json AudioRequest(const std::string& kind, const AudioRef& audio,
                              nlohmann::json options);

  std::string base_url_;
  HttpClientOptions options_;
  std::atomic<uint64_t> next_id_{0};
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
};

// Hermetic stand-ins for the neural models:
//   asr       words from the optional stub-words sidecar whose midpoint lies
//             in the window, else empty text
//   dnsmos    1 + 4 * clamp(snr_db / 40), snr from frame-energy percentiles
//   vad       the built-in frame-level energy detector
//   embed     normalized log energies of a fixed difference-filter bank
//   separate  identity (returns the input uri)
//   diarize   one turn "spk0" covering the window
//   normalize the built-in normalizer
// Audio is loaded from `uri` on first use and cached.
class StubScorerClient : public ScorerClient {
 public:
  // `stub_words` is a JSON Lines file of {asset_id, start_s, end_s, word}
  // with an optional "model": such words are only heard by that ASR model.
  // An empty path disables it.
  explicit StubScorerClient(std::filesystem::path stub_words = {},
                            SegmenterConfig vad_config = {});

  std::string Transcribe(const AudioRef& audio, const std::string& model) override;
  double Dnsmos(const AudioRef& audio) override;
  std::vector<SpeechRegion> Vad(const AudioRef& audio) override;
  std::vector<float> Embed(const AudioRef& audio) override;
  std::string Separate(const AudioRef& audio) override;
  std::vector<DiarizationTurn> Diarize(const AudioRef& audio) override;
  std::string Normalize(const std::string& text) override;
  std::map<std::string, EndpointHealth> Health() override;

 private:
  struct StubWord {
    double start_s;
    double end_s;
    std::string word;
    std::string model;  // empty: every model
  };
  std::shared_ptr<const Waveform> Load(const AudioRef& audio);
  // Mono samples of the window.
  std::span<const float> Window(const AudioRef& audio,
                                std::shared_ptr<const Waveform>* holder);

  std::map<std::string, std::vector<StubWord>> words_;
  SegmenterConfig vad_config_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Waveform>> cache_;
};

// Forwards to another client and counts calls per endpoint.
class CountingClient : public ScorerClient {
 public:
  explicit CountingClient(ScorerClient* inner) : inner_(inner) {}

  std::string Transcribe(const AudioRef& a, const std::string& m) override;
  double Dnsmos(const AudioRef& a) override;
  std::vector<SpeechRegion> Vad(const AudioRef& a) override;
  std::vector<float> Embed(const AudioRef& a) override;
  std::string Separate(const AudioRef& a) override;
  std::vector<DiarizationTurn> Diarize(const AudioRef& a) override;
  std::string Normalize(const std::string& text) override;
  std::map<std::string, EndpointHealth> Health() override;

  int64_t calls() const { return calls_.load(); }

 private:
  ScorerClient* inner_;
  std::atomic<int64_t> calls_{0};
};

std::string Base64Encode(std::span<const uint8_t> bytes);
std::vector<uint8_t> Base64Decode(std::string_view text);

}  // namespace speechcurate

#endif  // SPEECHCURATE_SCORER_CLIENT_H_
