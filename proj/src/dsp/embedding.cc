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

#include "coughscreen/dsp/embedding.h"

#include <cmath>
#include <numbers>

#include "coughscreen/dsp/fft.h"
#include "coughscreen/dsp/mel.h"
#include "coughscreen/error.h"

namespace coughscreen::dsp {
namespace {

class SerializedProvider : public EmbeddingProvider {
 public:
  explicit SerializedProvider(std::shared_ptr<const EmbeddingProvider> inner)
      : inner_(std::move(inner)) {}

  std::string name() const override { return inner_->name(); }
  std::vector<std::vector<double>> Frames(
      const audio::AudioClip& clip) const override {
    std::lock_guard<std::mutex> lock(mu_);
    return inner_->Frames(clip);
  }
  bool thread_safe() const override { return true; }

 private:
  std::shared_ptr<const EmbeddingProvider> inner_;
  mutable std::mutex mu_;
};

constexpr int kFrontEndRate = 16000;
constexpr int kFrontEndWindow = 400;
constexpr int kFrontEndHop = 160;
constexpr int kFrontEndFft = 512;
constexpr double kFrontEndLogOffset = 0.01;

}  // namespace

EmbeddingVector Embed(const audio::AudioClip& clip,
                      const EmbeddingProvider& provider) {
  const auto frames = provider.Frames(clip);
  if (frames.empty()) {
    throw Error(ErrorKind::kContract,
                "embed: provider '" + provider.name() + "' returned no frames");
  }
  std::vector<double> mean(kProviderFrameWidth, 0.0);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (frames[f].size() != kProviderFrameWidth) {
      throw Error(ErrorKind::kContract,
                  "embed: provider '" + provider.name() + "' frame " +
                      std::to_string(f) + " has width " +
                      std::to_string(frames[f].size()) + ", expected " +
                      std::to_string(kProviderFrameWidth));
    }
    for (std::size_t d = 0; d < kProviderFrameWidth; ++d) mean[d] += frames[f][d];
  }
  const double n = static_cast<double>(frames.size());
  for (double& m : mean) m /= n;

  std::vector<double> var(kProviderFrameWidth, 0.0);
  for (const auto& frame : frames) {
    for (std::size_t d = 0; d < kProviderFrameWidth; ++d) {
      const double diff = frame[d] - mean[d];
      var[d] += diff * diff;
    }
  }
  EmbeddingVector out;
  out.values = std::move(mean);
  out.values.reserve(kEmbeddingDim);
  for (double v : var) out.values.push_back(std::sqrt(v / n));
  return out;
}

std::shared_ptr<const EmbeddingProvider> MakeConcurrencySafe(
    std::shared_ptr<const EmbeddingProvider> provider) {
  if (provider->thread_safe()) return provider;
  return std::make_shared<SerializedProvider>(std::move(provider));
}

std::vector<std::vector<double>> LogMelFrameProvider::Frames(
    const audio::AudioClip& clip) const {
  if (clip.empty()) {
    throw Error(ErrorKind::kEmptyInput, "log-mel frames: empty clip");
  }
  audio::AudioClip input = audio::Resample(clip, kFrontEndRate);
  if (input.samples.size() < static_cast<std::size_t>(kFrontEndWindow)) {
    input.samples.resize(kFrontEndWindow, 0.0);
  }
  const MelFilterbank bank(kFrontEndRate, kFrontEndFft,
                           static_cast<int>(kProviderFrameWidth), 125.0, 7500.0);
  PowerSpectrum spectrum(kFrontEndFft);
  std::vector<double> window(kFrontEndWindow);
  for (int i = 0; i < kFrontEndWindow; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / kFrontEndWindow);
  }

  const std::size_t n_frames =
      1 + (input.samples.size() - kFrontEndWindow) / kFrontEndHop;
  std::vector<double> frame(kFrontEndWindow);
  std::vector<double> power(spectrum.bins());
  std::vector<std::vector<double>> out(n_frames,
                                       std::vector<double>(kProviderFrameWidth));
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (int i = 0; i < kFrontEndWindow; ++i) {
      frame[i] = input.samples[t * kFrontEndHop + i] * window[i];
    }
    spectrum.Compute(frame, power);
    for (std::size_t m = 0; m < kProviderFrameWidth; ++m) {
      const auto w = bank.weights().row(m);
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * std::sqrt(power[k]);
      out[t][m] = std::log(acc + kFrontEndLogOffset);
    }
  }
  return out;
}

}  // namespace coughscreen::dsp
