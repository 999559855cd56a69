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

#include <cmath>
#include <functional>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "speechcurate/audio_codec.h"
#include "speechcurate/external_stage.h"
#include "speechcurate/scorer_client.h"
#include "speechcurate/synth.h"
#include "test_support.h"

using namespace speechcurate;
using nlohmann::json;
using testing::TempDir;

namespace {

// In-process model service. Each endpoint answers every request line with
// the result computed by `reply`, unless a test overrides the raw body.
class MockService {
 public:
  using Reply = std::function<json(const json& request)>;

  MockService() {
    for (const char* kind : {"asr", "dnsmos", "vad", "embed", "separate", "diarize", "normalize"}) {
      const std::string k = kind;
      server_.Post("/" + k, [this, k](const httplib::Request& req, httplib::Response& res) {
        Handle(k, req, res);
      });
    }
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      json j = {{"endpoints",
                 {{"asr", {{"available", true}, {"model", "whisper-large-v3"}}},
                  {"dnsmos", {{"available", false}, {"model", "dnsmos-p835"}}}}}};
      res.set_content(j.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::map<std::string, Reply> replies;
  std::string raw_body;        // sent verbatim when set
  int status = 200;
  std::string version = kProtocolVersion;
  std::vector<json> seen;      // every request line received
  std::vector<std::string> seen_headers;

 private:
  void Handle(const std::string& kind, const httplib::Request& req, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mu_);
    seen_headers.push_back(req.get_header_value("X-Protocol-Version"));
    res.set_header("X-Protocol-Version", version);
    if (status != 200) {
      res.status = status;
      res.set_content(json{{"error", "busy"}}.dump(), "application/json");
      return;
    }
    if (!raw_body.empty()) {
      res.set_content(raw_body, "application/x-ndjson");
      return;
    }
    std::vector<json> lines;
    for (const auto& line : SplitLines(req.body))
      if (!line.empty()) lines.push_back(json::parse(line));
    std::string out;
    // Answer in reverse order; clients must match on request_id.
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
      seen.push_back(*it);
      json reply = {{"request_id", (*it)["request_id"]}, {"status", "ok"},
                    {"model", "mock"}, {"version", kProtocolVersion}};
      auto r = replies.find(kind);
      reply["result"] = r != replies.end() ? r->second(*it) : json(nullptr);
      out += reply.dump() + "\n";
    }
    res.set_content(out, "application/x-ndjson");
  }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
};

AudioRef Ref(const std::string& uri, double s = 0.0, double e = 0.0) {
  AudioRef r;
  r.uri = uri;
  r.asset_id = "asset1";
  r.start_s = s;
  r.end_s = e;
  return r;
}

}  // namespace

TEST_SUITE("scorer_client") {

TEST_CASE("request envelope and endpoint contracts") {
  MockService svc;
  svc.replies["asr"] = [](const json& r) { return "model " + r["options"]["model"].get<std::string>(); };
  svc.replies["dnsmos"] = [](const json&) { return 3.25; };
  svc.replies["vad"] = [](const json&) { return json::array({{2.0, 3.0}, {0.5, 1.0}, {0.9, 1.5}}); };
  svc.replies["embed"] = [](const json&) { return json::array({0.5, -0.5, 1.0}); };
  svc.replies["separate"] = [](const json&) { return json{{"uri", "/sep/vocals.wav"}}; };
  svc.replies["diarize"] = [](const json&) {
    return json::array({{{"start_s", 5.0}, {"end_s", 6.0}, {"speaker", "B"}},
                        {{"start_s", 0.0}, {"end_s", 5.0}, {"speaker", "A"}}});
  };
  svc.replies["normalize"] = [](const json& r) { return "norm:" + r["text"].get<std::string>(); };
  HttpScorerClient c(svc.url() + "/");

  CHECK(c.Transcribe(Ref("/a.wav", 1.0, 4.0), "whisper-small") == "model whisper-small");
  const json& asr = svc.seen.back();
  CHECK(asr["kind"] == "asr");
  CHECK(asr["audio"]["uri"] == "/a.wav");
  CHECK(asr["audio"]["start_s"] == 1.0);
  CHECK(asr["audio"]["end_s"] == 4.0);
  CHECK(asr["asset_id"] == "asset1");
  CHECK(svc.seen_headers.back() == kProtocolVersion);

  CHECK(c.Dnsmos(Ref("/a.wav")) == 3.25);
  CHECK_FALSE(svc.seen.back()["audio"].contains("start_s"));
  CHECK(c.Vad(Ref("/a.wav")) ==
        std::vector<SpeechRegion>{{0.5, 1.5}, {2.0, 3.0}});
  CHECK(c.Embed(Ref("/a.wav")) == std::vector<float>{0.5f, -0.5f, 1.0f});
  CHECK(c.Separate(Ref("/a.wav")) == "/sep/vocals.wav");
  auto turns = c.Diarize(Ref("/a.wav"));
  REQUIRE(turns.size() == 2);
  CHECK(turns[0].speaker_label == "A");
  CHECK(c.Normalize("Hi") == "norm:Hi");
  CHECK(svc.seen.back()["kind"] == "normalize");
}

TEST_CASE("inline audio is sent as base64 pcm16") {
  MockService svc;
  std::vector<uint8_t> got;
  svc.replies["dnsmos"] = [&](const json& r) {
    got = Base64Decode(r["audio"]["pcm16_b64"].get<std::string>());
    return 2.0;
  };
  auto w = std::make_shared<Waveform>();
  w->samples = {0.0f, 0.5f, -0.5f, 1.0f};
  AudioRef ref;
  ref.audio = w;
  HttpScorerClient c(svc.url());
  CHECK(c.Dnsmos(ref) == 2.0);
  REQUIRE(got.size() == 8);
  CHECK(static_cast<int16_t>(got[2] | (got[3] << 8)) == 16384);
  CHECK(svc.seen.back()["audio"]["sample_rate_hz"] == 16000);
}

TEST_CASE("batch replies are matched by request id") {
  MockService svc;
  svc.replies["asr"] = [](const json& r) { return r["audio"]["uri"]; };
  HttpScorerClient c(svc.url());
  std::vector<AudioRef> batch = {Ref("/1.wav"), Ref("/2.wav"), Ref("/3.wav")};
  CHECK(c.TranscribeBatch(batch, "m") == std::vector<std::string>{"/1.wav", "/2.wav", "/3.wav"});
  CHECK(svc.seen.size() == 3);
}

TEST_CASE("malformed replies raise protocol errors") {
  MockService svc;
  HttpScorerClient c(svc.url());
  svc.raw_body = "this is not json\n";
  CHECK_THROWS_AS(c.Dnsmos(Ref("/a.wav")), ProtocolError);
  svc.raw_body = R"({"request_id":"nope","status":"ok","result":3})";
  CHECK_THROWS_AS(c.Dnsmos(Ref("/a.wav")), ProtocolError);
  svc.raw_body.clear();
  svc.replies["dnsmos"] = [](const json&) { return 7.5; };
  try {
    c.Dnsmos(Ref("/a.wav"));
    FAIL("out-of-range DNSMOS accepted");
  } catch (const ProtocolError& e) {
    CHECK(e.asset_id() == "asset1");
  }
  svc.replies["vad"] = [](const json&) { return json::array({{3.0, 1.0}}); };
  CHECK_THROWS_AS(c.Vad(Ref("/a.wav")), ProtocolError);
  svc.replies["vad"] = [](const json&) { return json::array({{0.0, 9.0}}); };
  CHECK_THROWS_AS(c.Vad(Ref("/a.wav", 1.0, 4.0)), ProtocolError);
  svc.replies["embed"] = [](const json&) { return json::array(); };
  CHECK_THROWS_AS(c.Embed(Ref("/a.wav")), ProtocolError);
  svc.replies["asr"] = [](const json&) { return 12; };
  CHECK_THROWS_AS(c.Transcribe(Ref("/a.wav"), "m"), ProtocolError);
  svc.replies["diarize"] = [](const json&) { return json::array({{{"start_s", 1.0}}}); };
  CHECK_THROWS_AS(c.Diarize(Ref("/a.wav")), ProtocolError);
  svc.version = "2";
  svc.replies["dnsmos"] = [](const json&) { return 3.0; };
  CHECK_THROWS_AS(c.Dnsmos(Ref("/a.wav")), ProtocolError);
}

TEST_CASE("service errors carry retryability") {
  MockService svc;
  HttpScorerClient c(svc.url());
  svc.status = 503;
  try {
    c.Dnsmos(Ref("/a.wav"));
    FAIL("expected AdapterError");
  } catch (const ProtocolError&) {
    FAIL("HTTP errors are not protocol errors");
  } catch (const AdapterError& e) {
    CHECK(e.retryable());
    CHECK(std::string(e.what()).find("busy") != std::string::npos);
  }
  svc.status = 400;
  try {
    c.Dnsmos(Ref("/a.wav"));
  } catch (const AdapterError& e) {
    CHECK_FALSE(e.retryable());
  }
  svc.status = 200;
  svc.raw_body.clear();
  svc.replies.clear();
  // status:error replies: simulate by raw body with the request id guessed.
  HttpScorerClient fresh(svc.url());
  svc.raw_body = R"({"request_id":"dnsmos-0","status":"error","error":"oom","retryable":true})";
  try {
    fresh.Dnsmos(Ref("/a.wav"));
    FAIL("expected AdapterError");
  } catch (const AdapterError& e) {
    CHECK(e.retryable());
    CHECK(std::string(e.what()).find("oom") != std::string::npos);
  }
}

TEST_CASE("health endpoint") {
  MockService svc;
  HttpScorerClient c(svc.url());
  auto h = c.Health();
  REQUIRE(h.count("asr"));
  CHECK(h["asr"].available);
  CHECK(h["asr"].model == "whisper-large-v3");
  CHECK_FALSE(h["dnsmos"].available);
}

TEST_CASE("unreachable service is a retryable adapter error") {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
    std::thread t([&] { probe.listen_after_bind(); });
    probe.wait_until_ready();
    probe.stop();  // closes the listening socket
    t.join();
  }
  HttpClientOptions o;
  o.connect_timeout_s = 0.5;
  o.read_timeout_s = 1.0;
  HttpScorerClient c("http://127.0.0.1:" + std::to_string(port), o);
  try {
    c.Dnsmos(Ref("/a.wav"));
    FAIL("expected AdapterError");
  } catch (const AdapterError& e) {
    CHECK(e.retryable());
    CHECK(e.asset_id() == "asset1");
  }
  CHECK_THROWS_AS(c.Health(), AdapterError);
  CHECK_THROWS_AS(HttpScorerClient(""), ConfigError);
}

TEST_CASE("concurrent calls share one client") {
  MockService svc;
  svc.replies["dnsmos"] = [](const json&) { return 4.0; };
  HttpClientOptions o;
  o.max_in_flight = 2;
  HttpScorerClient c(svc.url(), o);
  std::atomic<int> ok{0};
  std::vector<std::thread> ts;
  for (int i = 0; i < 8; ++i)
    ts.emplace_back([&] {
      if (c.Dnsmos(Ref("/a.wav")) == 4.0) ++ok;
    });
  for (auto& t : ts) t.join();
  CHECK(ok == 8);
}

TEST_CASE("base64 round trip") {
  Rng rng(1);
  for (size_t n = 0; n < 40; ++n) {
    std::vector<uint8_t> bytes(n);
    for (auto& b : bytes) b = static_cast<uint8_t>(rng.UniformIndex(256));
    CHECK(Base64Decode(Base64Encode(bytes)) == bytes);
  }
  CHECK(Base64Encode(std::vector<uint8_t>{'M', 'a'}) == "TWE=");
}

TEST_CASE("stub client is deterministic and reads stub words") {
  TempDir tmp;
  Rng rng(8);
  PlantedLayout layout;
  layout.duration_s = 10.0;
  layout.speech = {{1.0, 4.0}, {6.0, 9.0}};
  WriteWav(tmp / "a.wav", RenderLayout(layout, 16000, 1, -20.0, -60.0, rng));
  WriteFileAtomic(tmp / "words.jsonl",
                  R"({"asset_id":"a","start_s":1.0,"end_s":1.5,"word":"hello"})" "\n"
                  R"({"asset_id":"a","start_s":2.0,"end_s":2.5,"word":"big","model":"m1"})" "\n"
                  R"({"asset_id":"a","start_s":6.0,"end_s":6.5,"word":"world"})" "\n");
  StubScorerClient stub(tmp / "words.jsonl");
  AudioRef ref;
  ref.uri = (tmp / "a.wav").string();
  ref.asset_id = "a";
  CHECK(stub.Transcribe(ref, "m1") == "hello big world");
  CHECK(stub.Transcribe(ref, "m2") == "hello world");
  ref.start_s = 0.0;
  ref.end_s = 5.0;
  CHECK(stub.Transcribe(ref, "m2") == "hello");
  const double d = stub.Dnsmos(ref);
  CHECK(d >= 1.0);
  CHECK(d <= 5.0);
  CHECK(stub.Dnsmos(ref) == d);
  auto e = stub.Embed(ref);
  double norm = 0.0;
  for (float x : e) norm += static_cast<double>(x) * x;
  CHECK(norm == doctest::Approx(1.0));
  CHECK(stub.Separate(ref) == ref.uri);
  CHECK(stub.Diarize(ref).size() == 1);
  CHECK(stub.Health().at("asr").available);
  CHECK_THROWS_AS(StubScorerClient(tmp / "missing.jsonl"), ConfigError);
}

TEST_CASE("external stages wrap adapter failures with the asset id") {
  struct Failing : ScorerClient {
    std::vector<DiarizationTurn> Diarize(const AudioRef&) override {
      throw Error("model crashed");
    }
  } failing;
  AudioAsset a = testing::MakeAsset("rec7", "D");
  try {
    ApplyExternalStage(a, "diarize", failing);
    FAIL("expected AdapterError");
  } catch (const AdapterError& e) {
    CHECK(e.asset_id() == "rec7");
  }
  CHECK_THROWS_AS(ApplyExternalStage(a, "enhance", failing), ValidationError);

  struct Turns : ScorerClient {
    std::vector<DiarizationTurn> Diarize(const AudioRef&) override {
      return {{0.0, 4.0, "A"}, {4.0, 10.0, "B"}};
    }
  } turns;
  StageResult r = ApplyExternalStage(a, "diarize", turns);
  auto back = TurnsFromStage(r);
  REQUIRE(back.size() == 2);
  CHECK(DominantSpeaker(back, 3.0, 6.0) == "B");
  CHECK(DominantSpeaker(back, 2.0, 6.0) == "A");  // tie goes to the earlier turn
  CHECK_FALSE(DominantSpeaker(back, 11.0, 12.0).has_value());
}

}  // TEST_SUITE
