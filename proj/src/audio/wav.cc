/*
 * Copyright 2026 The Coughscreen Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "coughscreen/audio/audio.h"
#include "coughscreen/error.h"

namespace coughscreen::audio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  void Require(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorKind::kDecode,
                  std::string("wav: truncated while reading ") + what);
    }
  }
  std::uint16_t U16(const char* what) {
    Require(2, what);
    std::uint16_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t U32(const char* what) {
    Require(4, what);
    std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::string Tag(const char* what) {
    Require(4, what);
    std::string tag(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return tag;
  }
  void Skip(std::size_t n) { pos_ += std::min(n, remaining()); }
  std::span<const std::uint8_t> Take(std::size_t n) {
    n = std::min(n, remaining());
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Format {
  std::uint16_t encoding = 0;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
};

double DecodeSample(const std::uint8_t* p, const Format& fmt) {
  if (fmt.encoding == kFormatFloat) {
    if (fmt.bits == 32) {
      float f;
      std::memcpy(&f, p, 4);
      return f;
    }
    double d;
    std::memcpy(&d, p, 8);
    return d;
  }
  switch (fmt.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    case 32: {
      std::int32_t v;
      std::memcpy(&v, p, 4);
      return v / 2147483648.0;
    }
  }
  return 0.0;
}

AudioClip DecodeWav(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.Tag("RIFF tag") != "RIFF") {
    throw Error(ErrorKind::kDecode, "wav: missing RIFF header");
  }
  r.U32("RIFF size");
  if (r.Tag("WAVE tag") != "WAVE") {
    throw Error(ErrorKind::kDecode, "wav: missing WAVE tag");
  }

  Format fmt;
  bool have_fmt = false;
  while (r.remaining() >= 8) {
    const std::string id = r.Tag("chunk id");
    const std::uint32_t size = r.U32("chunk size");
    if (id == "fmt ") {
      if (size < 16) throw Error(ErrorKind::kDecode, "wav: fmt chunk too small");
      r.Require(size, "fmt chunk");
      const std::size_t start = r.position();
      fmt.encoding = r.U16("format tag");
      fmt.channels = r.U16("channels");
      fmt.sample_rate = static_cast<int>(r.U32("sample rate"));
      r.U32("byte rate");
      r.U16("block align");
      fmt.bits = r.U16("bits per sample");
      if (fmt.encoding == kFormatExtensible && size >= 40) {
        r.U16("cb size");
        r.U16("valid bits");
        r.U32("channel mask");
        fmt.encoding = r.U16("sub format");
      }
      r.Skip(size - (r.position() - start));
      if (size % 2 == 1) r.Skip(1);
      have_fmt = true;
      continue;
    }
    if (id == "data") {
      if (!have_fmt) throw Error(ErrorKind::kDecode, "wav: data before fmt");
      const bool pcm_ok = fmt.encoding == kFormatPcm &&
                          (fmt.bits == 8 || fmt.bits == 16 || fmt.bits == 24 ||
                           fmt.bits == 32);
      const bool float_ok =
          fmt.encoding == kFormatFloat && (fmt.bits == 32 || fmt.bits == 64);
      if (!pcm_ok && !float_ok) {
        throw Error(ErrorKind::kDecode,
                    "wav: unsupported encoding " + std::to_string(fmt.encoding) +
                        " with " + std::to_string(fmt.bits) + " bits");
      }
      if (fmt.channels <= 0 || fmt.sample_rate <= 0) {
        throw Error(ErrorKind::kDecode, "wav: invalid channel count or rate");
      }
      // Streaming writers leave the data size at 0 or 0xFFFFFFFF; decode
      // whatever whole frames are present.
      const auto payload = r.Take(size == 0 ? r.remaining() : size);
      const std::size_t frame_bytes =
          static_cast<std::size_t>(fmt.channels) * (fmt.bits / 8);
      const std::size_t frames = payload.size() / frame_bytes;
      if (frames == 0) throw Error(ErrorKind::kEmptyInput, "wav: no audio frames");

      AudioClip clip;
      clip.sample_rate = fmt.sample_rate;
      clip.samples.resize(frames);
      const std::size_t sample_bytes = fmt.bits / 8;
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        const std::uint8_t* p = payload.data() + f * frame_bytes;
        for (int c = 0; c < fmt.channels; ++c) {
          acc += DecodeSample(p + c * sample_bytes, fmt);
        }
        clip.samples[f] = std::clamp(acc / fmt.channels, -1.0, 1.0);
      }
      return clip;
    }
    r.Skip(size + (size % 2));
  }
  throw Error(ErrorKind::kDecode,
              have_fmt ? "wav: missing data chunk" : "wav: missing fmt chunk");
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}
void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}
void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioClip LoadClip(std::span<const std::uint8_t> bytes, ContainerKind hint) {
  if (bytes.empty()) throw Error(ErrorKind::kEmptyInput, "audio: empty input");
  (void)hint;  // WAV is the only container compiled in.
  return DecodeWav(bytes);
}

AudioClip LoadClipFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "audio: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return LoadClip(bytes);
}

std::vector<std::uint8_t> EncodeWavInterleaved16(
    std::span<const double> interleaved, int channels, int sample_rate) {
  std::vector<std::uint8_t> out;
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, static_cast<std::uint16_t>(channels));
  PutU32(out, static_cast<std::uint32_t>(sample_rate));
  PutU32(out, static_cast<std::uint32_t>(sample_rate * channels * 2));
  PutU16(out, static_cast<std::uint16_t>(channels * 2));
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double s : interleaved) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32767.0);
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return out;
}

std::vector<std::uint8_t> EncodeWav16(const AudioClip& clip, int channels) {
  std::vector<double> interleaved;
  interleaved.reserve(clip.samples.size() * channels);
  for (double s : clip.samples) {
    for (int c = 0; c < channels; ++c) interleaved.push_back(s);
  }
  return EncodeWavInterleaved16(interleaved, channels, clip.sample_rate);
}

}  // namespace coughscreen::audio
