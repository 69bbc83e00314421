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

// Fourth-order gammatone filterbank (Slaney's all-pole/zero IIR realization:
// four cascaded biquads per channel, unity gain at the center frequency).

#ifndef COUGHSCREEN_DSP_GAMMATONE_H_
#define COUGHSCREEN_DSP_GAMMATONE_H_

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "coughscreen/audio/audio.h"
#include "coughscreen/matrix.h"

namespace coughscreen::dsp {

inline constexpr int kCochleaChannels = 100;

struct GammatoneConfig {
  int channels = kCochleaChannels;
  double min_frequency = 50.0;
  // Upper center frequency as a fraction of the sample rate.
  double max_frequency_fraction = 0.45;
  // Glasberg & Moore ERB parameters.
  double ear_q = 9.26449;
  double min_bandwidth = 24.7;
};

// `n` center frequencies, ascending, uniformly spaced on the ERB-rate scale
// between `low` and `high` inclusive.
std::vector<double> ErbSpace(double low, double high, int n,
                             double ear_q = 9.26449,
                             double min_bandwidth = 24.7);

// Equivalent rectangular bandwidth at `hz`.
double Erb(double hz, double ear_q = 9.26449, double min_bandwidth = 24.7);

struct Cochleagram {
  Matrix values;  // channels x samples, raw (unrectified) filter output
  std::vector<double> center_frequencies;
};

class GammatoneFilterbank {
 public:
  GammatoneFilterbank(int sample_rate, const GammatoneConfig& config = {});

  int sample_rate() const { return sample_rate_; }
  int channels() const { return static_cast<int>(centers_.size()); }
  const std::vector<double>& center_frequencies() const { return centers_; }

  // Filters `input` through channel `channel` into `output` (same length).
  void FilterChannel(int channel, std::span<const double> input,
                     std::span<double> output) const;

 private:
  struct Biquad {
    double b0, b1, b2;  // numerator
    double a1, a2;      // denominator, a0 == 1
  };
  using Cascade = std::array<Biquad, 4>;

  int sample_rate_;
  std::vector<double> centers_;
  std::vector<Cascade> cascades_;
};

// Full cochleagram: one row per channel, one column per input sample.
// Throws Error{kEmptyInput} on an empty clip.
Cochleagram ComputeCochleagram(const audio::AudioClip& clip,
                               const GammatoneConfig& config = {});

// Streams channel outputs one at a time without materializing the full
// matrix. `visit(channel, row)` is called for every channel in order.
void ForEachCochleaChannel(
    const audio::AudioClip& clip, const GammatoneConfig& config,
    const std::function<void(int, std::span<const double>)>& visit);

}  // namespace coughscreen::dsp

#endif  // COUGHSCREEN_DSP_GAMMATONE_H_
