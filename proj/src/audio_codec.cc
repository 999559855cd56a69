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

#include "speechcurate/audio_codec.h"

extern "C" {
#include <libavcodec/avcodec.h>
#include <libavformat/avformat.h>
#include <libavutil/channel_layout.h>
#include <libavutil/opt.h>
}

#include <cstring>
#include <fstream>
#include <memory>

#include "speechcurate/resample.h"
#include "speechcurate/util.h"

namespace speechcurate {
namespace {

namespace fs = std::filesystem;

struct FormatCloser {
  void operator()(AVFormatContext* c) const { avformat_close_input(&c); }
};
struct CodecFreer {
  void operator()(AVCodecContext* c) const { avcodec_free_context(&c); }
};
struct FrameFreer {
  void operator()(AVFrame* f) const { av_frame_free(&f); }
};
struct PacketFreer {
  void operator()(AVPacket* p) const { av_packet_free(&p); }
};
using FormatPtr = std::unique_ptr<AVFormatContext, FormatCloser>;
using CodecPtr = std::unique_ptr<AVCodecContext, CodecFreer>;
using FramePtr = std::unique_ptr<AVFrame, FrameFreer>;
using PacketPtr = std::unique_ptr<AVPacket, PacketFreer>;

void QuietFfmpegLogs() {
  static const bool once = [] {
    av_log_set_level(AV_LOG_ERROR);
    return true;
  }();
  (void)once;
}

std::string AvError(int code) {
  char buf[AV_ERROR_MAX_STRING_SIZE] = {0};
  av_strerror(code, buf, sizeof(buf));
  return buf;
}

// Appends the samples of `frame` to `out` as interleaved float.
void AppendFrame(const AVFrame* frame, int channels, std::vector<float>* out) {
  const int n = frame->nb_samples;
  const auto fmt = static_cast<AVSampleFormat>(frame->format);
  const bool planar = av_sample_fmt_is_planar(fmt);
  const AVSampleFormat packed = av_get_packed_sample_fmt(fmt);
  const size_t base = out->size();
  out->resize(base + static_cast<size_t>(n) * channels);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      const int plane = planar ? c : 0;
      const int idx = planar ? i : i * channels + c;
      const uint8_t* data = frame->extended_data[plane];
      float v = 0.0f;
      switch (packed) {
        case AV_SAMPLE_FMT_U8:
          v = (static_cast<int>(data[idx]) - 128) / 128.0f;
          break;
        case AV_SAMPLE_FMT_S16:
          v = reinterpret_cast<const int16_t*>(data)[idx] / 32768.0f;
          break;
        case AV_SAMPLE_FMT_S32:
          v = static_cast<float>(reinterpret_cast<const int32_t*>(data)[idx] /
                                 2147483648.0);
          break;
        case AV_SAMPLE_FMT_FLT:
          v = reinterpret_cast<const float*>(data)[idx];
          break;
        case AV_SAMPLE_FMT_DBL:
          v = static_cast<float>(reinterpret_cast<const double*>(data)[idx]);
          break;
        default:
          throw ParseError("unsupported sample format");
      }
      (*out)[base + static_cast<size_t>(i) * channels + c] = v;
    }
  }
}

void DrainDecoder(AVCodecContext* ctx, AVFrame* frame, int channels,
                  std::vector<float>* out) {
  while (true) {
    int r = avcodec_receive_frame(ctx, frame);
    if (r == AVERROR(EAGAIN) || r == AVERROR_EOF) return;
    if (r < 0) throw ParseError("audio decode failed: " + AvError(r));
    AppendFrame(frame, channels, out);
    av_frame_unref(frame);
  }
}

void PutU32(std::string* s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void PutU64(std::string* s, uint64_t v) {
  for (int i = 0; i < 8; ++i) s->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::span<const uint8_t> Bytes(size_t n) {
    Need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void Need(size_t n) const {
    if (data_.size() - pos_ < n) throw ParseError("truncated opus data");
  }
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

constexpr char kBlobMagic[4] = {'S', 'C', 'O', 'P'};
constexpr char kShardMagic[8] = {'S', 'C', 'O', 'P', 'S', 'H', 'R', 'D'};

}  // namespace

Waveform DecodeAudioFile(const fs::path& path) {
  QuietFfmpegLogs();
  AVFormatContext* raw = nullptr;
  int r = avformat_open_input(&raw, path.c_str(), nullptr, nullptr);
  if (r < 0) throw ParseError("cannot decode " + path.string() + ": " + AvError(r));
  FormatPtr fmt(raw);
  r = avformat_find_stream_info(fmt.get(), nullptr);
  if (r < 0) throw ParseError("cannot decode " + path.string() + ": " + AvError(r));
  AVCodec* codec = nullptr;  // FFmpeg 4.x takes a non-const pointer here
  int stream = av_find_best_stream(fmt.get(), AVMEDIA_TYPE_AUDIO, -1, -1, &codec, 0);
  if (stream < 0 || codec == nullptr)
    throw ParseError("no audio stream in " + path.string());
  CodecPtr ctx(avcodec_alloc_context3(codec));
  avcodec_parameters_to_context(ctx.get(), fmt->streams[stream]->codecpar);
  ctx->thread_count = 1;
  r = avcodec_open2(ctx.get(), codec, nullptr);
  if (r < 0) throw ParseError("cannot open decoder: " + AvError(r));

  Waveform out;
  out.sample_rate_hz = ctx->sample_rate;
  out.channels = ctx->channels;
  if (out.channels <= 0 || out.sample_rate_hz <= 0)
    throw ParseError("invalid audio parameters in " + path.string());
  PacketPtr pkt(av_packet_alloc());
  FramePtr frame(av_frame_alloc());
  while (av_read_frame(fmt.get(), pkt.get()) >= 0) {
    if (pkt->stream_index == stream) {
      r = avcodec_send_packet(ctx.get(), pkt.get());
      if (r < 0 && r != AVERROR(EAGAIN))
        throw ParseError("audio decode failed: " + AvError(r));
      DrainDecoder(ctx.get(), frame.get(), out.channels, &out.samples);
    }
    av_packet_unref(pkt.get());
  }
  avcodec_send_packet(ctx.get(), nullptr);
  DrainDecoder(ctx.get(), frame.get(), out.channels, &out.samples);
  return out;
}

void WriteWav(const fs::path& path, const Waveform& audio, WavEncoding encoding) {
  const bool is_float = encoding == WavEncoding::kFloat32;
  const uint16_t bits = is_float ? 32 : 16;
  const uint16_t block = static_cast<uint16_t>(audio.channels * bits / 8);
  const uint32_t data_bytes = static_cast<uint32_t>(audio.samples.size() * (bits / 8));
  std::string s;
  s.reserve(44 + data_bytes);
  s += "RIFF";
  PutU32(&s, 36 + data_bytes);
  s += "WAVEfmt ";
  PutU32(&s, 16);
  s.push_back(static_cast<char>(is_float ? 3 : 1));
  s.push_back(0);
  s.push_back(static_cast<char>(audio.channels & 0xFF));
  s.push_back(static_cast<char>((audio.channels >> 8) & 0xFF));
  PutU32(&s, static_cast<uint32_t>(audio.sample_rate_hz));
  PutU32(&s, static_cast<uint32_t>(audio.sample_rate_hz) * block);
  s.push_back(static_cast<char>(block & 0xFF));
  s.push_back(static_cast<char>(block >> 8));
  s.push_back(static_cast<char>(bits & 0xFF));
  s.push_back(0);
  s += "data";
  PutU32(&s, data_bytes);
  for (float v : audio.samples) {
    if (is_float) {
      uint32_t bitsv;
      std::memcpy(&bitsv, &v, 4);
      PutU32(&s, bitsv);
    } else {
      float c = std::clamp(v, -1.0f, 1.0f);
      int32_t q = static_cast<int32_t>(std::lrint(c * 32767.0f));
      uint16_t u = static_cast<uint16_t>(static_cast<int16_t>(q));
      s.push_back(static_cast<char>(u & 0xFF));
      s.push_back(static_cast<char>(u >> 8));
    }
  }
  WriteFileAtomic(path, s);
}

std::vector<uint8_t> PackageOpus(std::span<const float> mono) {
  if (mono.empty()) throw ValidationError("cannot encode an empty waveform");
  QuietFfmpegLogs();
  const AVCodec* codec = avcodec_find_encoder_by_name("libopus");
  if (codec == nullptr) throw ConfigError("Opus encoder unavailable");
  CodecPtr ctx(avcodec_alloc_context3(codec));
  ctx->sample_rate = kStandardSampleRate;
  ctx->channels = 1;
  ctx->channel_layout = AV_CH_LAYOUT_MONO;
  ctx->sample_fmt = AV_SAMPLE_FMT_FLT;
  ctx->bit_rate = kOpusBitrate;
  ctx->thread_count = 1;
  int r = avcodec_open2(ctx.get(), codec, nullptr);
  if (r < 0) throw ConfigError("cannot open Opus encoder: " + AvError(r));

  const int frame_size = ctx->frame_size;
  std::vector<std::vector<uint8_t>> packets;
  PacketPtr pkt(av_packet_alloc());
  FramePtr frame(av_frame_alloc());
  auto drain = [&] {
    while (true) {
      int rr = avcodec_receive_packet(ctx.get(), pkt.get());
      if (rr == AVERROR(EAGAIN) || rr == AVERROR_EOF) return;
      if (rr < 0) throw Error("Opus encode failed: " + AvError(rr));
      packets.emplace_back(pkt->data, pkt->data + pkt->size);
      av_packet_unref(pkt.get());
    }
  };
  int64_t pts = 0;
  for (size_t pos = 0; pos < mono.size(); pos += static_cast<size_t>(frame_size)) {
    av_frame_unref(frame.get());
    frame->nb_samples = frame_size;
    frame->format = AV_SAMPLE_FMT_FLT;
    frame->channel_layout = AV_CH_LAYOUT_MONO;
    frame->channels = 1;
    frame->sample_rate = kStandardSampleRate;
    if (av_frame_get_buffer(frame.get(), 0) < 0) throw Error("frame allocation failed");
    auto* dst = reinterpret_cast<float*>(frame->data[0]);
    const size_t n = std::min(mono.size() - pos, static_cast<size_t>(frame_size));
    std::memcpy(dst, mono.data() + pos, n * sizeof(float));
    std::fill(dst + n, dst + frame_size, 0.0f);
    frame->pts = pts;
    pts += frame_size;
    r = avcodec_send_frame(ctx.get(), frame.get());
    if (r < 0) throw Error("Opus encode failed: " + AvError(r));
    drain();
  }
  avcodec_send_frame(ctx.get(), nullptr);
  drain();

  std::string s(kBlobMagic, 4);
  PutU64(&s, mono.size());
  PutU32(&s, static_cast<uint32_t>(std::max(0, ctx->initial_padding)));
  PutU32(&s, static_cast<uint32_t>(ctx->extradata_size));
  s.append(reinterpret_cast<const char*>(ctx->extradata),
           static_cast<size_t>(ctx->extradata_size));
  PutU32(&s, static_cast<uint32_t>(packets.size()));
  for (const auto& p : packets) {
    PutU32(&s, static_cast<uint32_t>(p.size()));
    s.append(reinterpret_cast<const char*>(p.data()), p.size());
  }
  return std::vector<uint8_t>(s.begin(), s.end());
}

Waveform UnpackOpus(std::span<const uint8_t> blob) {
  QuietFfmpegLogs();
  ByteReader in(blob);
  auto magic = in.Bytes(4);
  if (std::memcmp(magic.data(), kBlobMagic, 4) != 0)
    throw ParseError("not an Opus segment blob");
  const uint64_t sample_count = in.U64();
  in.U32();  // encoder padding at 16 kHz; the decoder applies pre-skip
  auto extradata = in.Bytes(in.U32());

  const AVCodec* codec = avcodec_find_decoder_by_name("libopus");
  if (codec == nullptr) codec = avcodec_find_decoder(AV_CODEC_ID_OPUS);
  if (codec == nullptr) throw ConfigError("Opus decoder unavailable");
  CodecPtr ctx(avcodec_alloc_context3(codec));
  ctx->sample_rate = kStandardSampleRate;
  ctx->channels = 1;
  ctx->channel_layout = AV_CH_LAYOUT_MONO;
  ctx->thread_count = 1;
  if (!extradata.empty()) {
    ctx->extradata = static_cast<uint8_t*>(
        av_mallocz(extradata.size() + AV_INPUT_BUFFER_PADDING_SIZE));
    std::memcpy(ctx->extradata, extradata.data(), extradata.size());
    ctx->extradata_size = static_cast<int>(extradata.size());
  }
  int r = avcodec_open2(ctx.get(), codec, nullptr);
  if (r < 0) throw ConfigError("cannot open Opus decoder: " + AvError(r));

  std::vector<float> decoded;
  PacketPtr pkt(av_packet_alloc());
  FramePtr frame(av_frame_alloc());
  const uint32_t count = in.U32();
  for (uint32_t i = 0; i < count; ++i) {
    auto bytes = in.Bytes(in.U32());
    if (av_new_packet(pkt.get(), static_cast<int>(bytes.size())) < 0)
      throw Error("packet allocation failed");
    std::memcpy(pkt->data, bytes.data(), bytes.size());
    r = avcodec_send_packet(ctx.get(), pkt.get());
    av_packet_unref(pkt.get());
    if (r < 0) throw ParseError("Opus decode failed: " + AvError(r));
    DrainDecoder(ctx.get(), frame.get(), 1, &decoded);
  }
  avcodec_send_packet(ctx.get(), nullptr);
  DrainDecoder(ctx.get(), frame.get(), 1, &decoded);

  // FFmpeg's libopus decoder always runs at 48 kHz and applies the
  // header pre-skip itself; bring the result back to 16 kHz.
  const int rate = ctx->sample_rate > 0 ? ctx->sample_rate : 48000;
  if (rate != kStandardSampleRate)
    decoded = Resample(decoded, rate, kStandardSampleRate);
  Waveform out;
  out.sample_rate_hz = kStandardSampleRate;
  out.channels = 1;
  out.samples = std::move(decoded);
  out.samples.resize(sample_count, 0.0f);
  return out;
}

void OpusShardWriter::Add(const std::string& segment_id,
                          const std::string& manifest_line,
                          std::vector<uint8_t> opus_blob) {
  entries_.push_back({segment_id, manifest_line, std::move(opus_blob)});
}

void OpusShardWriter::Write(const fs::path& path) const {
  std::string s(kShardMagic, 8);
  PutU32(&s, static_cast<uint32_t>(entries_.size()));
  for (const auto& e : entries_) {
    PutU32(&s, static_cast<uint32_t>(e.segment_id.size()));
    s += e.segment_id;
    PutU32(&s, static_cast<uint32_t>(e.manifest_line.size()));
    s += e.manifest_line;
    PutU32(&s, static_cast<uint32_t>(e.blob.size()));
    s.append(reinterpret_cast<const char*>(e.blob.data()), e.blob.size());
  }
  WriteFileAtomic(path, s);
}

std::map<std::string, OpusShardEntry> ReadOpusShard(const fs::path& path) {
  std::string data = ReadFile(path);
  ByteReader in(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(data.data()), data.size()));
  auto magic = in.Bytes(8);
  if (std::memcmp(magic.data(), kShardMagic, 8) != 0)
    throw ParseError("not an Opus shard archive: " + path.string());
  std::map<std::string, OpusShardEntry> out;
  const uint32_t n = in.U32();
  for (uint32_t i = 0; i < n; ++i) {
    auto id = in.Bytes(in.U32());
    auto line = in.Bytes(in.U32());
    auto blob = in.Bytes(in.U32());
    OpusShardEntry e;
    e.manifest_line.assign(line.begin(), line.end());
    e.blob.assign(blob.begin(), blob.end());
    out.emplace(std::string(id.begin(), id.end()), std::move(e));
  }
  return out;
}

}  // namespace speechcurate
