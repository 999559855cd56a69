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

#include "speechcurate/manifest_io.h"

#include <charconv>
#include <cmath>
#include <set>

#include "speechcurate/util.h"

namespace speechcurate {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path AssetsPathFor(const fs::path& manifest_path) {
  fs::path p = manifest_path;
  if (p.extension() == ".jsonl") p.replace_extension();
  p += ".assets.jsonl";
  return p;
}

std::string ShortestReal(double value) {
  if (!std::isfinite(value)) throw ValidationError("non-finite number");
  if (value == 0.0) value = 0.0;  // drop negative zero
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string QuoteJson(std::string_view text) {
  return json(std::string(text)).dump();
}

void LineBuilder::Key(std::string_view key) {
  if (!first_) body_ += ',';
  first_ = false;
  body_ += QuoteJson(key);
  body_ += ':';
}

LineBuilder& LineBuilder::Str(std::string_view key, std::string_view value) {
  Key(key);
  body_ += QuoteJson(value);
  return *this;
}

LineBuilder& LineBuilder::Fixed(std::string_view key, double value,
                                int decimals) {
  if (!std::isfinite(value)) throw ValidationError("non-finite number");
  Key(key);
  body_ += FormatFixed(value, decimals);
  return *this;
}

LineBuilder& LineBuilder::Real(std::string_view key, double value) {
  Key(key);
  body_ += ShortestReal(value);
  return *this;
}

LineBuilder& LineBuilder::Int(std::string_view key, int64_t value) {
  Key(key);
  body_ += std::to_string(value);
  return *this;
}

LineBuilder& LineBuilder::Bool(std::string_view key, bool value) {
  Key(key);
  body_ += value ? "true" : "false";
  return *this;
}

LineBuilder& LineBuilder::Raw(std::string_view key, std::string_view value) {
  Key(key);
  body_ += value;
  return *this;
}

FieldReader::FieldReader(std::string_view line, size_t line_number)
    : line_number_(line_number) {
  try {
    json_ = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(line_number) +
                     ": malformed record: " + e.what());
  }
  if (!json_.is_object())
    throw ParseError("line " + std::to_string(line_number) +
                     ": record must be an object");
}

void FieldReader::Fail(std::string_view field, std::string_view what) const {
  throw ParseError("line " + std::to_string(line_number_) + ", field '" +
                   std::string(field) + "': " + std::string(what));
}

const nlohmann::json& FieldReader::Get(const char* key) const {
  auto it = json_.find(key);
  if (it == json_.end()) Fail(key, "missing required field");
  return *it;
}

bool FieldReader::Has(const char* key) const {
  auto it = json_.find(key);
  return it != json_.end() && !it->is_null();
}

std::string FieldReader::Str(const char* key) const {
  const nlohmann::json& v = Get(key);
  if (!v.is_string()) Fail(key, "expected string");
  return v.get<std::string>();
}

std::optional<std::string> FieldReader::OptStr(const char* key) const {
  if (!Has(key)) return std::nullopt;
  return Str(key);
}

double FieldReader::Real(const char* key) const {
  const nlohmann::json& v = Get(key);
  if (!v.is_number()) Fail(key, "expected number");
  double d = v.get<double>();
  if (!std::isfinite(d)) Fail(key, "expected finite number");
  return d;
}

std::optional<double> FieldReader::OptReal(const char* key) const {
  if (!Has(key)) return std::nullopt;
  return Real(key);
}

int64_t FieldReader::Int(const char* key) const {
  const nlohmann::json& v = Get(key);
  if (!v.is_number_integer()) Fail(key, "expected integer");
  return v.get<int64_t>();
}

std::optional<int64_t> FieldReader::OptInt(const char* key) const {
  if (!Has(key)) return std::nullopt;
  return Int(key);
}

bool FieldReader::Bool(const char* key) const {
  const nlohmann::json& v = Get(key);
  if (!v.is_boolean()) Fail(key, "expected boolean");
  return v.get<bool>();
}

std::optional<bool> FieldReader::OptBool(const char* key) const {
  if (!Has(key)) return std::nullopt;
  return Bool(key);
}

void FieldReader::RejectUnknown(const std::vector<std::string_view>& allowed,
                                std::string_view open_prefix) const {
  for (auto it = json_.begin(); it != json_.end(); ++it) {
    const std::string& k = it.key();
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!open_prefix.empty() && k.rfind(open_prefix, 0) == 0) ok = true;
    if (!ok) Fail(k, "unknown field");
  }
}

std::string EncodeRecord(const SegmentRecord& r) {
  LineBuilder b;
  b.Str("segment_id", r.segment_id)
      .Str("asset_id", r.asset_id)
      .Fixed("start_s", r.start_s, 3)
      .Fixed("end_s", r.end_s, 3)
      .Str("text", r.text);
  if (r.speaker_id) b.Str("speaker_id", *r.speaker_id);
  if (r.scores) {
    b.Real("dnsmos", r.scores->dnsmos)
        .Real("wer", r.scores->wer)
        .Real("speech_ratio", r.scores->speech_ratio);
  }
  if (r.score_error) b.Str("score_error", *r.score_error);
  if (r.keep) b.Bool("keep", *r.keep);
  for (const auto& [k, v] : r.tags) b.Str("tags." + k, v);
  return b.Finish();
}

SegmentRecord DecodeRecord(std::string_view line, size_t line_number) {
  FieldReader f(line, line_number);
  f.RejectUnknown({"segment_id", "asset_id", "start_s", "end_s", "text",
                   "speaker_id", "dnsmos", "wer", "speech_ratio",
                   "score_error", "keep"},
                  "tags.");
  SegmentRecord r;
  r.segment_id = f.Str("segment_id");
  r.asset_id = f.Str("asset_id");
  r.start_s = f.Real("start_s");
  r.end_s = f.Real("end_s");
  r.text = f.Str("text");
  r.speaker_id = f.OptStr("speaker_id");
  auto dns = f.OptReal("dnsmos");
  auto wer = f.OptReal("wer");
  auto sr = f.OptReal("speech_ratio");
  int present = (dns ? 1 : 0) + (wer ? 1 : 0) + (sr ? 1 : 0);
  if (present == 3) {
    r.scores = QualityScores{*dns, *wer, *sr};
  } else if (present != 0) {
    f.Fail(dns ? (wer ? "speech_ratio" : "wer") : "dnsmos",
           "scores must be all present or all absent");
  }
  r.score_error = f.OptStr("score_error");
  r.keep = f.OptBool("keep");
  for (auto it = f.json().begin(); it != f.json().end(); ++it) {
    const std::string& k = it.key();
    if (k.rfind("tags.", 0) != 0) continue;
    if (!it->is_string()) f.Fail(k, "expected string");
    r.tags.emplace(k.substr(5), it->get<std::string>());
  }
  return r;
}

std::string EncodeAsset(const AudioAsset& a) {
  LineBuilder b;
  b.Str("asset_id", a.asset_id)
      .Str("uri", a.uri)
      .Fixed("duration_s", a.duration_s, 3)
      .Int("sample_rate_hz", a.sample_rate_hz)
      .Int("channels", a.channels)
      .Str("source_dataset", a.source_dataset);
  if (a.sub_split) b.Str("sub_split", *a.sub_split);
  b.Str("language", a.language).Str("license", a.license);
  return b.Finish();
}

AudioAsset DecodeAsset(std::string_view line, size_t line_number) {
  FieldReader f(line, line_number);
  f.RejectUnknown({"asset_id", "uri", "duration_s", "sample_rate_hz",
                   "channels", "source_dataset", "sub_split", "language",
                   "license"});
  AudioAsset a;
  a.asset_id = f.Str("asset_id");
  a.uri = f.Str("uri");
  a.duration_s = f.Real("duration_s");
  a.sample_rate_hz = static_cast<int>(f.Int("sample_rate_hz"));
  a.channels = static_cast<int>(f.Int("channels"));
  a.source_dataset = f.Str("source_dataset");
  a.sub_split = f.OptStr("sub_split");
  a.language = f.OptStr("language").value_or("en");
  a.license = f.OptStr("license").value_or("");
  return a;
}

std::vector<std::string> ReadNonBlankLines(const fs::path& path,
                                           std::vector<size_t>* line_numbers) {
  std::string text = ReadFile(path);
  std::vector<std::string> out;
  size_t n = 0;
  for (auto& line : SplitLines(text)) {
    ++n;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(std::move(line));
    if (line_numbers) line_numbers->push_back(n);
  }
  return out;
}

DatasetManifest ReadManifest(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("manifest not found: " + path.string());
  DatasetManifest m(path.stem().string());
  for (auto& r : ReadLines(path, DecodeRecord)) m.AddRecord(std::move(r));
  fs::path assets = AssetsPathFor(path);
  if (fs::exists(assets)) {
    for (auto& a : ReadLines(assets, DecodeAsset)) {
      try {
        m.AddAsset(std::move(a));
      } catch (const ValidationError& e) {
        throw ValidationError(assets.string() + ": " + e.what());
      }
    }
  }
  try {
    m.Validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  m.Canonicalize();
  return m;
}

void WriteManifest(const DatasetManifest& manifest, const fs::path& path) {
  manifest.Validate();
  std::vector<const SegmentRecord*> order;
  order.reserve(manifest.records().size());
  for (const auto& r : manifest.records()) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](auto* a, auto* b) { return CanonicalLess(*a, *b); });
  std::string body;
  for (const auto* r : order) {
    body += EncodeRecord(*r);
    body += '\n';
  }
  std::string assets;
  for (const auto& [id, a] : manifest.assets()) {
    assets += EncodeAsset(a);
    assets += '\n';
  }
  WriteFileAtomic(AssetsPathFor(path), assets);
  WriteFileAtomic(path, body);
}

DatasetManifest MergeManifests(std::vector<DatasetManifest> parts,
                               std::string name) {
  DatasetManifest out(std::move(name));
  std::set<std::string> seen;
  for (auto& part : parts) {
    for (const auto& [id, a] : part.assets()) out.AddAsset(a);
    for (auto& r : part.mutable_records()) {
      if (!seen.insert(r.segment_id).second)
        throw ValidationError("duplicate segment_id across shards: " +
                              r.segment_id);
      out.AddRecord(std::move(r));
    }
  }
  out.Canonicalize();
  return out;
}

DatasetManifest MergeShards(const std::vector<fs::path>& shards) {
  std::vector<DatasetManifest> parts;
  parts.reserve(shards.size());
  for (const auto& p : shards) parts.push_back(ReadManifest(p));
  return MergeManifests(std::move(parts), "merged");
}

}  // namespace speechcurate
