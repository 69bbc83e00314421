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

// Canonical mono audio and the operations that produce it: container
// decoding, sample-rate conversion, silence trimming and peak normalization.

#ifndef COUGHSCREEN_AUDIO_AUDIO_H_
#define COUGHSCREEN_AUDIO_AUDIO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace coughscreen::audio {

inline constexpr int kClassifierSampleRate = 48000;
inline constexpr int kDetectorSampleRate = 8000;

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
  bool empty() const { return samples.empty(); }
};

enum class ContainerKind { kAuto, kWav };

// Decodes an encoded container into a mono clip at its native rate.
// Multi-channel audio is averaged to mono. Throws Error{kDecode} on malformed
// bytes and Error{kEmptyInput} when the container holds no frames.
AudioClip LoadClip(std::span<const std::uint8_t> bytes,
                   ContainerKind hint = ContainerKind::kAuto);

// Reads a whole file and calls LoadClip.
AudioClip LoadClipFile(const std::string& path);

// 16-bit PCM WAV encoder, used by tools and tests to produce fixtures.
std::vector<std::uint8_t> EncodeWav16(const AudioClip& clip, int channels = 1);
std::vector<std::uint8_t> EncodeWavInterleaved16(
    std::span<const double> interleaved, int channels, int sample_rate);

struct ResampleOptions {
  // Half-width of the windowed-sinc kernel, in zero crossings of the lower
  // of the two Nyquist rates. Higher is sharper and slower.
  int zero_crossings = 16;
  // Kaiser window shape parameter.
  double kaiser_beta = 8.6;
  // Passband edge as a fraction of the lower Nyquist frequency.
  double rolloff = 0.945;
};

// Band-limited polyphase resampling. Returns the input unchanged when the
// rates already match.
AudioClip Resample(const AudioClip& clip, int target_rate,
                   const ResampleOptions& options = {});

struct TrimOptions {
  int frame_length = 2048;
  int hop_length = 512;
  double threshold_db = -60.0;
};

// Removes leading and trailing frames whose RMS lies more than
// |threshold_db| below the loudest frame. Interior samples are untouched.
// Throws Error{kEmptyInput} when nothing remains (fully silent clip).
AudioClip TrimSilence(const AudioClip& clip, const TrimOptions& options = {});

// Scales so that max |sample| == 1. Throws Error{kDegenerateInput} on an
// all-zero clip.
AudioClip PeakNormalize(const AudioClip& clip);

double PeakAbs(std::span<const double> samples);

// True when the clip holds no non-zero sample.
bool IsSilent(const AudioClip& clip);

// Resample to 48 kHz, trim, peak-normalize: the representation shared by the
// Mel-spectrogram and cochleagram paths.
AudioClip Canonicalize(const AudioClip& clip, const TrimOptions& trim = {},
                       const ResampleOptions& resample = {});

}  // namespace coughscreen::audio

#endif  // COUGHSCREEN_AUDIO_AUDIO_H_
