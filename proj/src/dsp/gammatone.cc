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

#include "coughscreen/dsp/gammatone.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "coughscreen/error.h"

namespace coughscreen::dsp {

double Erb(double hz, double ear_q, double min_bandwidth) {
  return hz / ear_q + min_bandwidth;
}

std::vector<double> ErbSpace(double low, double high, int n, double ear_q,
                             double min_bandwidth) {
  if (n <= 0 || low <= 0.0 || high <= low) {
    throw Error(ErrorKind::kInvalidArgument, "erb_space: bad range");
  }
  const double q = ear_q * min_bandwidth;
  const double lo = std::log(low + q);
  const double hi = std::log(high + q);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out[i] = std::exp(lo + frac * (hi - lo)) - q;
  }
  return out;
}

GammatoneFilterbank::GammatoneFilterbank(int sample_rate,
                                         const GammatoneConfig& config)
    : sample_rate_(sample_rate) {
  if (sample_rate <= 0 || config.channels <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "gammatone: bad configuration");
  }
  const double high = config.max_frequency_fraction * sample_rate;
  centers_ = ErbSpace(config.min_frequency, high, config.channels,
                      config.ear_q, config.min_bandwidth);

  const double t = 1.0 / sample_rate;
  const double rt_pos = std::sqrt(3.0 + std::pow(2.0, 1.5));
  const double rt_neg = std::sqrt(3.0 - std::pow(2.0, 1.5));
  cascades_.reserve(centers_.size());
  for (double cf : centers_) {
    const double bw = 1.019 * 2.0 * std::numbers::pi *
                      Erb(cf, config.ear_q, config.min_bandwidth);
    const double arg = 2.0 * std::numbers::pi * cf * t;
    const double decay = std::exp(-bw * t);
    const double a1 = -2.0 * std::cos(arg) * decay;
    const double a2 = std::exp(-2.0 * bw * t);
    const double common = -t * decay;
    const std::array<double, 4> zeros = {
        common * (std::cos(arg) + rt_pos * std::sin(arg)),
        common * (std::cos(arg) - rt_pos * std::sin(arg)),
        common * (std::cos(arg) + rt_neg * std::sin(arg)),
        common * (std::cos(arg) - rt_neg * std::sin(arg)),
    };

    // Normalize to unity magnitude at the center frequency.
    const std::complex<double> z_inv = std::polar(1.0, -arg);
    std::complex<double> response = 1.0;
    for (double b1 : zeros) {
      response *= (t + b1 * z_inv) / (1.0 + a1 * z_inv + a2 * z_inv * z_inv);
    }
    const double gain = std::abs(response);

    Cascade cascade;
    for (int s = 0; s < 4; ++s) {
      const double scale = s == 0 ? 1.0 / gain : 1.0;
      cascade[s] = Biquad{t * scale, zeros[s] * scale, 0.0, a1, a2};
    }
    cascades_.push_back(cascade);
  }
}

void GammatoneFilterbank::FilterChannel(int channel,
                                        std::span<const double> input,
                                        std::span<double> output) const {
  const Cascade& cascade = cascades_.at(channel);
  std::array<double, 4> s1{};
  std::array<double, 4> s2{};
  const std::size_t n = std::min(input.size(), output.size());
  for (std::size_t i = 0; i < n; ++i) {
    double x = input[i];
    for (int s = 0; s < 4; ++s) {
      const Biquad& q = cascade[s];
      // Transposed direct form II.
      const double y = q.b0 * x + s1[s];
      s1[s] = q.b1 * x - q.a1 * y + s2[s];
      s2[s] = q.b2 * x - q.a2 * y;
      x = y;
    }
    output[i] = x;
  }
}

void ForEachCochleaChannel(
    const audio::AudioClip& clip, const GammatoneConfig& config,
    const std::function<void(int, std::span<const double>)>& visit) {
  if (clip.empty()) {
    throw Error(ErrorKind::kEmptyInput, "cochleagram: empty clip");
  }
  const GammatoneFilterbank bank(clip.sample_rate, config);
  std::vector<double> row(clip.samples.size());
  for (int c = 0; c < bank.channels(); ++c) {
    bank.FilterChannel(c, clip.samples, row);
    visit(c, row);
  }
}

Cochleagram ComputeCochleagram(const audio::AudioClip& clip,
                               const GammatoneConfig& config) {
  if (clip.empty()) {
    throw Error(ErrorKind::kEmptyInput, "cochleagram: empty clip");
  }
  const GammatoneFilterbank bank(clip.sample_rate, config);
  Cochleagram out;
  out.center_frequencies = bank.center_frequencies();
  out.values = Matrix(bank.channels(), clip.samples.size());
  for (int c = 0; c < bank.channels(); ++c) {
    bank.FilterChannel(c, clip.samples, out.values.row(c));
  }
  return out;
}

}  // namespace coughscreen::dsp
