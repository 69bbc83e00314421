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

// Log-power Mel spectrograms for the classifier network and the cough
// detector.
//
// The Mel scale and filter shapes follow the Slaney convention used by common
// Python audio tooling: linear below 1 kHz, logarithmic above, with
// area-normalized triangular filters. Frames are centered on their hop
// position and the signal is reflect-padded by half an FFT at both ends.

#ifndef COUGHSCREEN_DSP_MEL_H_
#define COUGHSCREEN_DSP_MEL_H_

#include <cstdint>
#include <vector>

#include "coughscreen/audio/audio.h"
#include "coughscreen/matrix.h"

namespace coughscreen::dsp {

inline constexpr int kMelBins = 128;
// 8 s of 14 ms hops.
inline constexpr std::size_t kClassifierFrames = 571;
inline constexpr std::size_t kDetectorFrames = 512;
inline constexpr double kLogFloorPower = 1e-10;

struct MelSpectrogram {
  Matrix values;      // n_mels x frames, natural-log power
  Matrix positional;  // same shape, row i == i / (n_mels - 1); empty if unused
  int sample_rate = 0;
  double hop_seconds = 0.0;

  std::size_t n_mels() const { return values.rows(); }
  std::size_t frames() const { return values.cols(); }
  bool has_positional() const { return !positional.empty(); }
};

struct SpectrogramConfig {
  int sample_rate = 0;
  int window_length = 0;
  int fft_size = 0;
  int hop_length = 0;
  int n_mels = kMelBins;
  double fmin = 0.0;
  double fmax = 0.0;
  bool positional_channel = false;

  // 54 ms Hann frames, 14 ms hop at 48 kHz, 20 Hz - 24 kHz, with positional
  // channel.
  static SpectrogramConfig Classifier();
  // 743-sample frames, 186 hop at 8 kHz, full band, single channel.
  static SpectrogramConfig Detector();
};

double HzToMel(double hz);
double MelToHz(double mel);

class MelFilterbank {
 public:
  MelFilterbank(int sample_rate, int fft_size, int n_mels, double fmin,
                double fmax);

  // n_mels x (fft_size / 2 + 1), non-negative.
  const Matrix& weights() const { return weights_; }
  // Peak frequency of each triangle, strictly increasing.
  const std::vector<double>& center_frequencies() const { return centers_; }

 private:
  Matrix weights_;
  std::vector<double> centers_;
};

// Generic log-Mel transform. Throws Error{kTooShort} when the clip is shorter
// than one window and Error{kInvalidArgument} on a sample-rate mismatch.
MelSpectrogram ComputeMelSpectrogram(const audio::AudioClip& clip,
                                     const SpectrogramConfig& config);

// Classifier representation: requires a 48 kHz clip.
MelSpectrogram ClassifierMelSpectrogram(const audio::AudioClip& clip);

enum class FitMode { kDeterministic, kRandom };

// Crops or cyclically replicates along time to exactly `target_frames`
// columns. Deterministic mode takes the centered crop / replication from
// column 0; random mode draws the crop start or replication offset from
// `seed`.
MelSpectrogram FitTimeAxis(const MelSpectrogram& spec,
                           std::size_t target_frames,
                           FitMode mode = FitMode::kDeterministic,
                           std::uint64_t seed = 0);

// Cough-detector input: peak-normalize (skipped for digital silence),
// resample to 8 kHz, zero-pad to 2 s, transform, then center-fit to 512
// frames. Always 128 x 512. Throws Error{kEmptyInput} on an empty clip.
MelSpectrogram DetectorSpectrogram(const audio::AudioClip& clip);

}  // namespace coughscreen::dsp

#endif  // COUGHSCREEN_DSP_MEL_H_
