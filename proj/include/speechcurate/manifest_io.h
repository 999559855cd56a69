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

#ifndef SPEECHCURATE_MANIFEST_IO_H_
#define SPEECHCURATE_MANIFEST_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "speechcurate/corpus.h"

namespace speechcurate {

// Manifest files are UTF-8 JSON Lines, one record per line, so shards can
// be concatenated. The asset table lives in a companion file next to the
// record file: "name.jsonl" pairs with "name.assets.jsonl".

std::filesystem::path AssetsPathFor(const std::filesystem::path& manifest_path);

std::string EncodeRecord(const SegmentRecord& record);
std::string EncodeAsset(const AudioAsset& asset);
SegmentRecord DecodeRecord(std::string_view line, size_t line_number);
AudioAsset DecodeAsset(std::string_view line, size_t line_number);

// Reads records and their asset table, validates and canonicalizes. The
// manifest name is the file stem. A missing asset file is accepted only
// when there are no records.
DatasetManifest ReadManifest(const std::filesystem::path& path);
void WriteManifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

// Union of disjoint shards in canonical order. Throws ValidationError
// naming any segment_id found in more than one shard.
DatasetManifest MergeShards(const std::vector<std::filesystem::path>& shards);
DatasetManifest MergeManifests(std::vector<DatasetManifest> parts,
                               std::string name);

/// Ordered JSON object writer. Keys appear in insertion order and numbers
/// use fixed formatting so identical inputs give identical bytes.
class LineBuilder {
 public:
  LineBuilder& Str(std::string_view key, std::string_view value);
  LineBuilder& Fixed(std::string_view key, double value, int decimals);
  // Shortest representation that parses back to the same double.
  LineBuilder& Real(std::string_view key, double value);
  LineBuilder& Int(std::string_view key, int64_t value);
  LineBuilder& Bool(std::string_view key, bool value);
  // Pre-encoded JSON value.
  LineBuilder& Raw(std::string_view key, std::string_view json);

  std::string Finish() const { return body_ + "}"; }

 private:
  void Key(std::string_view key);
  std::string body_ = "{";
  bool first_ = true;
};

std::string ShortestReal(double value);
std::string QuoteJson(std::string_view text);

/// Typed access to one parsed line with errors that name the line and field.
class FieldReader {
 public:
  FieldReader(std::string_view line, size_t line_number);

  std::string Str(const char* key) const;
  std::optional<std::string> OptStr(const char* key) const;
  double Real(const char* key) const;
  std::optional<double> OptReal(const char* key) const;
  int64_t Int(const char* key) const;
  std::optional<int64_t> OptInt(const char* key) const;
  bool Bool(const char* key) const;
  std::optional<bool> OptBool(const char* key) const;
  bool Has(const char* key) const;
  const nlohmann::json& json() const { return json_; }

  // Throws unless every key is in `allowed` or starts with `open_prefix`.
  void RejectUnknown(const std::vector<std::string_view>& allowed,
                     std::string_view open_prefix = {}) const;

  [[noreturn]] void Fail(std::string_view field, std::string_view what) const;

 private:
  const nlohmann::json& Get(const char* key) const;
  nlohmann::json json_;
  size_t line_number_;
};

// Parses every non-blank line of `path` with `decode(line, line_number)`.
template <typename Decode>
auto ReadLines(const std::filesystem::path& path, Decode decode)
    -> std::vector<decltype(decode(std::string_view{}, size_t{}))>;

std::vector<std::string> ReadNonBlankLines(const std::filesystem::path& path,
                                           std::vector<size_t>* line_numbers);

template <typename Decode>
auto ReadLines(const std::filesystem::path& path, Decode decode)
    -> std::vector<decltype(decode(std::string_view{}, size_t{}))> {
  std::vector<size_t> numbers;
  std::vector<std::string> lines = ReadNonBlankLines(path, &numbers);
  std::vector<decltype(decode(std::string_view{}, size_t{}))> out;
  out.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i)
    out.push_back(decode(lines[i], numbers[i]));
  return out;
}

}  // namespace speechcurate

#endif  // SPEECHCURATE_MANIFEST_IO_H_
