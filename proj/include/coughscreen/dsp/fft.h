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

#ifndef COUGHSCREEN_DSP_FFT_H_
#define COUGHSCREEN_DSP_FFT_H_

#include <memory>
#include <span>

namespace coughscreen::dsp {

// Real-input power spectrum of arbitrary length (not restricted to powers of
// two). One instance owns its plan and buffers and must not be shared across
// threads; construct one per worker.
class PowerSpectrum {
 public:
  explicit PowerSpectrum(int size);
  ~PowerSpectrum();
  PowerSpectrum(const PowerSpectrum&) = delete;
  PowerSpectrum& operator=(const PowerSpectrum&) = delete;

  int size() const { return size_; }
  int bins() const { return size_ / 2 + 1; }

  // Writes |X_k|^2 for k in [0, size/2] into `power`.
  void Compute(std::span<const double> frame, std::span<double> power);

 private:
  struct Impl;
  int size_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace coughscreen::dsp

#endif  // COUGHSCREEN_DSP_FFT_H_
