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

#ifndef COUGHSCREEN_DSP_EMBEDDING_H_
#define COUGHSCREEN_DSP_EMBEDDING_H_

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "coughscreen/audio/audio.h"

namespace coughscreen::dsp {

inline constexpr std::size_t kEmbeddingDim = 256;
// Per-frame width expected from providers; mean and std blocks fill 256.
inline constexpr std::size_t kProviderFrameWidth = kEmbeddingDim / 2;

struct EmbeddingVector {
  std::vector<double> values;
};

// Source of per-frame audio embeddings (e.g. a pretrained audio network).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  // Frames x kProviderFrameWidth.
  virtual std::vector<std::vector<double>> Frames(
      const audio::AudioClip& clip) const = 0;
  // Providers that return false are wrapped by MakeConcurrencySafe.
  virtual bool thread_safe() const { return true; }
};

// Mean over frames followed by population standard deviation over frames.
// Throws Error{kContract} if the provider returns no frames or a frame of the
// wrong width; provider exceptions propagate unchanged.
EmbeddingVector Embed(const audio::AudioClip& clip,
                      const EmbeddingProvider& provider);

// Returns `provider` itself when it is thread safe, otherwise a wrapper that
// serializes calls behind a mutex.
std::shared_ptr<const EmbeddingProvider> MakeConcurrencySafe(
    std::shared_ptr<const EmbeddingProvider> provider);

// Built-in provider: 128-band log-Mel magnitude frames at 16 kHz (25 ms
// windows, 10 ms hop, 125-7500 Hz), the front end of common pretrained audio
// embedding networks. Used when no network artifact is configured.
class LogMelFrameProvider : public EmbeddingProvider {
 public:
  std::string name() const override { return "log-mel-frames"; }
  std::vector<std::vector<double>> Frames(
      const audio::AudioClip& clip) const override;
};

// Emits the same vector for a fixed number of frames. Test double.
class ConstantFrameProvider : public EmbeddingProvider {
 public:
  ConstantFrameProvider(std::vector<double> frame, std::size_t count = 4)
      : frame_(std::move(frame)), count_(count) {}
  std::string name() const override { return "constant-frames"; }
  std::vector<std::vector<double>> Frames(
      const audio::AudioClip&) const override {
    return std::vector<std::vector<double>>(count_, frame_);
  }

 private:
  std::vector<double> frame_;
  std::size_t count_;
};

}  // namespace coughscreen::dsp

#endif  // COUGHSCREEN_DSP_EMBEDDING_H_
