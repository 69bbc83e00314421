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

// Tree-ensemble input: per-channel cochleagram statistics followed by an
// audio embedding.
//
// Layout of the 1356-value vector:
//   [0, 1100)     channel-major statistics, index 11 * channel + stat
//   [1100, 1356)  embedding
// Statistic order within a channel: mean, median, std, skew, kurtosis, min,
// max, q1, q3, iqr, l2.

#ifndef COUGHSCREEN_DSP_FEATURES_H_
#define COUGHSCREEN_DSP_FEATURES_H_

#include <array>
#include <span>
#include <vector>

#include "coughscreen/audio/audio.h"
#include "coughscreen/dsp/embedding.h"
#include "coughscreen/dsp/gammatone.h"
#include "coughscreen/matrix.h"

namespace coughscreen::dsp {

inline constexpr std::size_t kStatsPerBin = 11;
inline constexpr std::size_t kStatsBlockLength = kCochleaChannels * kStatsPerBin;
inline constexpr std::size_t kFeatureLength =
    kStatsBlockLength + kEmbeddingDim;  // 1356

enum StatIndex : std::size_t {
  kMean = 0,
  kMedian,
  kStd,
  kSkew,
  kKurtosis,
  kMin,
  kMax,
  kQ1,
  kQ3,
  kIqr,
  kL2,
};

// Population moments; skew and excess kurtosis are 0 for a constant row.
// Quartiles interpolate linearly between closest ranks.
struct BinStatistics {
  double mean = 0, median = 0, std = 0, skew = 0, kurtosis = 0;
  double min = 0, max = 0, q1 = 0, q3 = 0, iqr = 0, l2 = 0;

  std::array<double, kStatsPerBin> ToArray() const {
    return {mean, median, std, skew, kurtosis, min, max, q1, q3, iqr, l2};
  }
};

// Throws Error{kEmptyInput} for an empty row.
BinStatistics ComputeBinStatistics(std::span<const double> row);

struct FeatureVector {
  std::vector<double> values;
};

// channels x 11 matrix of statistics, one row per cochleagram channel.
Matrix CochleagramStatistics(const Cochleagram& cochleagram);

// Same result as CochleagramStatistics(ComputeCochleagram(clip)) but never
// holds more than one channel in memory.
Matrix StreamingCochleagramStatistics(const audio::AudioClip& clip,
                                      const GammatoneConfig& config = {});

// Throws Error{kContract} unless statistics are 100 x 11 and the embedding
// has 256 values.
FeatureVector AssembleFeatureVector(const Matrix& statistics,
                                    const EmbeddingVector& embedding);
FeatureVector AssembleFeatureVector(const Cochleagram& cochleagram,
                                    const EmbeddingVector& embedding);

// Cochleagram statistics of `clip` joined with the provider's embedding.
FeatureVector ExtractFeatureVector(const audio::AudioClip& clip,
                                   const EmbeddingProvider& provider,
                                   const GammatoneConfig& config = {});

}  // namespace coughscreen::dsp

#endif  // COUGHSCREEN_DSP_FEATURES_H_
