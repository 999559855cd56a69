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

#ifndef SPEECHCURATE_AUDIO_CODEC_H_
#define SPEECHCURATE_AUDIO_CODEC_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "speechcurate/audio.h"

namespace speechcurate {

// Decodes WAV, FLAC, Opus (and anything else the linked FFmpeg handles) to
// interleaved float. Throws ParseError for undecodable input.
Waveform DecodeAudioFile(const std::filesystem::path& path);

enum class WavEncoding { kPcm16, kFloat32 };
void WriteWav(const std::filesystem::path& path, const Waveform& audio,
              WavEncoding encoding = WavEncoding::kPcm16);

constexpr int kOpusBitrate = 64000;

// 64 kbps Opus at 16 kHz mono. The returned blob is self-contained: it
// carries the codec header and the exact sample count so the decoded
// length matches the input. Throws ConfigError if the codec is missing.
std::vector<uint8_t> PackageOpus(std::span<const float> mono_16k);
Waveform UnpackOpus(std::span<const uint8_t> blob);

/// Per-shard archive: Opus segments keyed by segment_id, each stored with
/// its manifest line. Entries are written in the order added.
class OpusShardWriter {
 public:
  void Add(const std::string& segment_id, const std::string& manifest_line,
           std::vector<uint8_t> opus_blob);
  void Write(const std::filesystem::path& path) const;
  size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string segment_id;
    std::string manifest_line;
    std::vector<uint8_t> blob;
  };
  std::vector<Entry> entries_;
};

struct OpusShardEntry {
  std::string manifest_line;
  std::vector<uint8_t> blob;
};

std::map<std::string, OpusShardEntry> ReadOpusShard(
    const std::filesystem::path& path);

}  // namespace speechcurate

#endif  // SPEECHCURATE_AUDIO_CODEC_H_
