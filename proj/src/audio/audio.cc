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

#include "coughscreen/audio/audio.h"

#include <algorithm>
#include <cmath>

#include "coughscreen/error.h"

namespace coughscreen {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDecode: return "decode";
    case ErrorKind::kEmptyInput: return "empty_input";
    case ErrorKind::kDegenerateInput: return "degenerate_input";
    case ErrorKind::kTooShort: return "too_short";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kLoad: return "load";
    case ErrorKind::kRuntime: return "runtime";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kUndefined: return "undefined";
    case ErrorKind::kStorage: return "storage";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kConflict: return "conflict";
  }
  return "unknown";
}

namespace audio {

double PeakAbs(std::span<const double> samples) {
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  return peak;
}

bool IsSilent(const AudioClip& clip) { return PeakAbs(clip.samples) == 0.0; }

AudioClip TrimSilence(const AudioClip& clip, const TrimOptions& options) {
  if (options.threshold_db >= 0.0) {
    throw Error(ErrorKind::kInvalidArgument,
                "trim_silence: threshold_db must be negative");
  }
  if (options.frame_length <= 0 || options.hop_length <= 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "trim_silence: frame and hop must be positive");
  }
  const auto n = static_cast<std::int64_t>(clip.samples.size());
  if (n == 0) throw Error(ErrorKind::kEmptyInput, "trim_silence: empty clip");

  const std::int64_t frame = options.frame_length;
  const std::int64_t hop = options.hop_length;
  const std::int64_t n_frames =
      n <= frame ? 1 : 1 + (n - frame + hop - 1) / hop;

  // Frames beyond the end are implicitly zero-padded.
  std::vector<double> rms(n_frames);
  for (std::int64_t f = 0; f < n_frames; ++f) {
    const std::int64_t begin = f * hop;
    const std::int64_t end = std::min(n, begin + frame);
    double energy = 0.0;
    for (std::int64_t i = begin; i < end; ++i) {
      energy += clip.samples[i] * clip.samples[i];
    }
    rms[f] = std::sqrt(energy / frame);
  }
  const double ref = *std::max_element(rms.begin(), rms.end());
  if (ref == 0.0) {
    throw Error(ErrorKind::kEmptyInput, "trim_silence: clip is fully silent");
  }
  const double floor = ref * std::pow(10.0, options.threshold_db / 20.0);

  std::int64_t first = -1;
  std::int64_t last = -1;
  for (std::int64_t f = 0; f < n_frames; ++f) {
    if (rms[f] > floor) {
      if (first < 0) first = f;
      last = f;
    }
  }
  const std::int64_t begin = first * hop;
  const std::int64_t end = std::min(n, last * hop + frame);

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.assign(clip.samples.begin() + begin, clip.samples.begin() + end);
  return out;
}

AudioClip PeakNormalize(const AudioClip& clip) {
  const double peak = PeakAbs(clip.samples);
  if (peak == 0.0) {
    throw Error(ErrorKind::kDegenerateInput,
                "peak_normalize: clip is all zeros");
  }
  AudioClip out = clip;
  if (peak == 1.0) return out;
  // Divide rather than multiply by 1/peak so the peak sample lands on 1.0
  // exactly and a second pass is the identity.
  for (double& s : out.samples) s = std::clamp(s / peak, -1.0, 1.0);
  return out;
}

AudioClip Canonicalize(const AudioClip& clip, const TrimOptions& trim,
                       const ResampleOptions& resample) {
  if (clip.empty()) throw Error(ErrorKind::kEmptyInput, "audio: empty clip");
  AudioClip out = Resample(clip, kClassifierSampleRate, resample);
  out = TrimSilence(out, trim);
  return PeakNormalize(out);
}

}  // namespace audio
}  // namespace coughscreen
