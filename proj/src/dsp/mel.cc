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

#include "coughscreen/dsp/mel.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "coughscreen/dsp/fft.h"
#include "coughscreen/error.h"

namespace coughscreen::dsp {
namespace {

constexpr double kLinearHzPerMel = 200.0 / 3.0;
constexpr double kBreakHz = 1000.0;
constexpr double kBreakMel = kBreakHz / kLinearHzPerMel;  // 15
const double kLogStep = std::log(6.4) / 27.0;

constexpr double kDetectorPadSeconds = 2.0;

std::vector<double> PeriodicHann(int length) {
  std::vector<double> w(length);
  for (int i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  }
  return w;
}

// Index into a signal of length n after reflect padding (no edge repeat).
std::int64_t Reflect(std::int64_t i, std::int64_t n) {
  if (n == 1) return 0;
  const std::int64_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

SpectrogramConfig SpectrogramConfig::Classifier() {
  SpectrogramConfig c;
  c.sample_rate = audio::kClassifierSampleRate;
  c.window_length = 2592;  // 54 ms
  c.fft_size = 4096;
  c.hop_length = 672;  // 14 ms
  c.n_mels = kMelBins;
  c.fmin = 20.0;
  c.fmax = 24000.0;
  c.positional_channel = true;
  return c;
}

SpectrogramConfig SpectrogramConfig::Detector() {
  SpectrogramConfig c;
  c.sample_rate = audio::kDetectorSampleRate;
  c.window_length = 743;
  c.fft_size = 743;
  c.hop_length = 186;
  c.n_mels = kMelBins;
  c.fmin = 0.0;
  c.fmax = audio::kDetectorSampleRate / 2.0;
  c.positional_channel = false;
  return c;
}

double HzToMel(double hz) {
  if (hz < kBreakHz) return hz / kLinearHzPerMel;
  return kBreakMel + std::log(hz / kBreakHz) / kLogStep;
}

double MelToHz(double mel) {
  if (mel < kBreakMel) return mel * kLinearHzPerMel;
  return kBreakHz * std::exp(kLogStep * (mel - kBreakMel));
}

MelFilterbank::MelFilterbank(int sample_rate, int fft_size, int n_mels,
                             double fmin, double fmax) {
  if (n_mels <= 0 || fft_size <= 0 || sample_rate <= 0 || fmax <= fmin) {
    throw Error(ErrorKind::kInvalidArgument, "mel filterbank: bad parameters");
  }
  const int n_bins = fft_size / 2 + 1;
  weights_ = Matrix(n_mels, n_bins);

  const double mel_lo = HzToMel(fmin);
  const double mel_hi = HzToMel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  }
  centers_.assign(edges.begin() + 1, edges.end() - 1);

  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    const double area_norm = 2.0 / (hi - lo);
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      const double rising = (f - lo) / (mid - lo);
      const double falling = (hi - f) / (hi - mid);
      weights_(m, k) = std::max(0.0, std::min(rising, falling)) * area_norm;
    }
  }
}

MelSpectrogram ComputeMelSpectrogram(const audio::AudioClip& clip,
                                     const SpectrogramConfig& config) {
  if (clip.sample_rate != config.sample_rate) {
    throw Error(ErrorKind::kInvalidArgument,
                "mel_spectrogram: expected " +
                    std::to_string(config.sample_rate) + " Hz input, got " +
                    std::to_string(clip.sample_rate));
  }
  if (clip.empty()) {
    throw Error(ErrorKind::kEmptyInput, "mel_spectrogram: empty clip");
  }
  const auto n = static_cast<std::int64_t>(clip.samples.size());
  if (n < config.window_length) {
    throw Error(ErrorKind::kTooShort,
                "mel_spectrogram: clip shorter than one frame (" +
                    std::to_string(n) + " < " +
                    std::to_string(config.window_length) + " samples)");
  }

  const int fft = config.fft_size;
  const std::int64_t pad = fft / 2;
  const std::int64_t frames = 1 + (n + 2 * pad - fft) / config.hop_length;

  // Window centered inside the FFT buffer.
  std::vector<double> window(fft, 0.0);
  {
    const auto hann = PeriodicHann(config.window_length);
    const int offset = (fft - config.window_length) / 2;
    std::copy(hann.begin(), hann.end(), window.begin() + offset);
  }

  const MelFilterbank bank(config.sample_rate, fft, config.n_mels, config.fmin,
                           config.fmax);
  PowerSpectrum spectrum(fft);
  std::vector<double> frame(fft);
  std::vector<double> power(spectrum.bins());

  MelSpectrogram out;
  out.sample_rate = config.sample_rate;
  out.hop_seconds = static_cast<double>(config.hop_length) / config.sample_rate;
  out.values = Matrix(config.n_mels, frames);
  const Matrix& w = bank.weights();
  for (std::int64_t t = 0; t < frames; ++t) {
    const std::int64_t start = t * config.hop_length - pad;
    for (int i = 0; i < fft; ++i) {
      frame[i] = clip.samples[Reflect(start + i, n)] * window[i];
    }
    spectrum.Compute(frame, power);
    for (int m = 0; m < config.n_mels; ++m) {
      const auto row = w.row(m);
      double acc = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * power[k];
      out.values(m, t) = std::log(std::max(acc, kLogFloorPower));
    }
  }

  if (config.positional_channel) {
    out.positional = Matrix(config.n_mels, frames);
    for (int m = 0; m < config.n_mels; ++m) {
      const double v =
          config.n_mels > 1 ? static_cast<double>(m) / (config.n_mels - 1) : 0.0;
      for (std::int64_t t = 0; t < frames; ++t) out.positional(m, t) = v;
    }
  }
  return out;
}

MelSpectrogram ClassifierMelSpectrogram(const audio::AudioClip& clip) {
  return ComputeMelSpectrogram(clip, SpectrogramConfig::Classifier());
}

MelSpectrogram FitTimeAxis(const MelSpectrogram& spec,
                           std::size_t target_frames, FitMode mode,
                           std::uint64_t seed) {
  if (target_frames == 0) {
    throw Error(ErrorKind::kInvalidArgument, "fit_time_axis: target must be > 0");
  }
  const std::size_t t_in = spec.frames();
  if (t_in == 0) {
    throw Error(ErrorKind::kEmptyInput, "fit_time_axis: empty spectrogram");
  }
  if (t_in == target_frames) return spec;

  // Source column for output column j is (j + offset) mod t_in; for crops
  // the offset is the crop start and never wraps.
  std::size_t offset = 0;
  if (t_in > target_frames) {
    const std::size_t slack = t_in - target_frames;
    if (mode == FitMode::kDeterministic) {
      offset = slack / 2;
    } else {
      std::mt19937_64 rng(seed);
      offset = std::uniform_int_distribution<std::size_t>(0, slack)(rng);
    }
  } else if (mode == FitMode::kRandom) {
    std::mt19937_64 rng(seed);
    offset = std::uniform_int_distribution<std::size_t>(0, t_in - 1)(rng);
  }

  auto fit = [&](const Matrix& in) {
    Matrix out(in.rows(), target_frames);
    for (std::size_t r = 0; r < in.rows(); ++r) {
      for (std::size_t j = 0; j < target_frames; ++j) {
        out(r, j) = in(r, (j + offset) % t_in);
      }
    }
    return out;
  };

  MelSpectrogram out;
  out.sample_rate = spec.sample_rate;
  out.hop_seconds = spec.hop_seconds;
  out.values = fit(spec.values);
  if (spec.has_positional()) out.positional = fit(spec.positional);
  return out;
}

MelSpectrogram DetectorSpectrogram(const audio::AudioClip& clip) {
  if (clip.empty()) {
    throw Error(ErrorKind::kEmptyInput, "detector_spectrogram: empty clip");
  }
  audio::AudioClip prepared =
      audio::IsSilent(clip) ? clip : audio::PeakNormalize(clip);
  prepared = audio::Resample(prepared, audio::kDetectorSampleRate);
  const auto min_samples = static_cast<std::size_t>(
      kDetectorPadSeconds * audio::kDetectorSampleRate);
  if (prepared.samples.size() < min_samples) {
    prepared.samples.resize(min_samples, 0.0);
  }
  const MelSpectrogram spec =
      ComputeMelSpectrogram(prepared, SpectrogramConfig::Detector());
  return FitTimeAxis(spec, kDetectorFrames, FitMode::kDeterministic);
}

}  // namespace coughscreen::dsp
