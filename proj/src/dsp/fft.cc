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

#include "coughscreen/dsp/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "coughscreen/error.h"

namespace coughscreen::dsp {
namespace {

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct PowerSpectrum::Impl {
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;
};

PowerSpectrum::PowerSpectrum(int size) : size_(size), impl_(new Impl) {
  if (size <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "fft: size must be positive");
  }
  std::lock_guard<std::mutex> lock(PlannerMutex());
  impl_->in = fftw_alloc_real(size);
  impl_->out = fftw_alloc_complex(size / 2 + 1);
  impl_->plan = fftw_plan_dft_r2c_1d(size, impl_->in, impl_->out,
                                     FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
}

PowerSpectrum::~PowerSpectrum() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(impl_->plan);
  fftw_free(impl_->in);
  fftw_free(impl_->out);
}

void PowerSpectrum::Compute(std::span<const double> frame,
                            std::span<double> power) {
  std::copy_n(frame.begin(), std::min<std::size_t>(frame.size(), size_),
              impl_->in);
  std::fill(impl_->in + std::min<std::size_t>(frame.size(), size_),
            impl_->in + size_, 0.0);
  fftw_execute(impl_->plan);
  const int n_bins = bins();
  for (int k = 0; k < n_bins && k < static_cast<int>(power.size()); ++k) {
    const double re = impl_->out[k][0];
    const double im = impl_->out[k][1];
    power[k] = re * re + im * im;
  }
}

}  // namespace coughscreen::dsp
