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
#include <numbers>
#include <numeric>

#include "coughscreen/audio/audio.h"
#include "coughscreen/error.h"

namespace coughscreen::audio {
namespace {

// Above this many phases the kernel is evaluated on the fly instead of
// tabulated per phase.
constexpr std::int64_t kMaxTabulatedPhases = 4096;

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

class Kernel {
 public:
  Kernel(double cutoff, int zero_crossings, double beta)
      : cutoff_(cutoff),
        half_width_(zero_crossings / cutoff),
        beta_(beta),
        norm_(1.0 / std::cyl_bessel_i(0.0, beta)) {}

  double half_width() const { return half_width_; }

  // Tap weight for an input sample `offset` input-samples away from the
  // output instant.
  double operator()(double offset) const {
    const double r = offset / half_width_;
    if (std::abs(r) >= 1.0) return 0.0;
    const double window =
        std::cyl_bessel_i(0.0, beta_ * std::sqrt(1.0 - r * r)) * norm_;
    return cutoff_ * Sinc(cutoff_ * offset) * window;
  }

 private:
  double cutoff_;
  double half_width_;
  double beta_;
  double norm_;
};

}  // namespace

AudioClip Resample(const AudioClip& clip, int target_rate,
                   const ResampleOptions& options) {
  if (target_rate <= 0 || clip.sample_rate <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "resample: rates must be positive");
  }
  if (target_rate == clip.sample_rate || clip.samples.empty()) {
    AudioClip out = clip;
    out.sample_rate = target_rate;
    return out;
  }

  const std::int64_t g = std::gcd(target_rate, clip.sample_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = clip.sample_rate / g;
  const auto n_in = static_cast<std::int64_t>(clip.samples.size());
  const std::int64_t n_out = (n_in * up + down - 1) / down;

  const double cutoff =
      options.rolloff * std::min(1.0, static_cast<double>(up) / down);
  const Kernel kernel(cutoff, options.zero_crossings, options.kaiser_beta);
  const auto reach = static_cast<std::int64_t>(std::ceil(kernel.half_width()));
  const std::int64_t taps = 2 * reach + 1;

  // Output j sits at input time j*down/up = base + phase/up. Tap k reads
  // input base - reach + k at offset (phase/up) + reach - k.
  std::vector<double> table;
  const bool tabulate = up <= kMaxTabulatedPhases;
  if (tabulate) {
    table.resize(up * taps);
    for (std::int64_t p = 0; p < up; ++p) {
      const double frac = static_cast<double>(p) / up;
      for (std::int64_t k = 0; k < taps; ++k) {
        table[p * taps + k] = kernel(frac + reach - k);
      }
    }
  }

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  std::vector<double> scratch(taps);
  for (std::int64_t j = 0; j < n_out; ++j) {
    const std::int64_t pos = j * down;
    const std::int64_t base = pos / up;
    const std::int64_t phase = pos % up;
    const double* weights;
    if (tabulate) {
      weights = table.data() + phase * taps;
    } else {
      const double frac = static_cast<double>(phase) / up;
      for (std::int64_t k = 0; k < taps; ++k) scratch[k] = kernel(frac + reach - k);
      weights = scratch.data();
    }
    double acc = 0.0;
    const std::int64_t first = base - reach;
    const std::int64_t k0 = std::max<std::int64_t>(0, -first);
    const std::int64_t k1 = std::min<std::int64_t>(taps, n_in - first);
    for (std::int64_t k = k0; k < k1; ++k) {
      acc += weights[k] * clip.samples[first + k];
    }
    out.samples[j] = acc;
  }
  return out;
}

}  // namespace coughscreen::audio
