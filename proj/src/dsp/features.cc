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

#include "coughscreen/dsp/features.h"

#include <algorithm>

#include "coughscreen/error.h"

namespace coughscreen::dsp {
namespace {

void StoreRow(Matrix& stats, std::size_t channel, const BinStatistics& s) {
  const auto values = s.ToArray();
  std::copy(values.begin(), values.end(), stats.row(channel).begin());
}

}  // namespace

Matrix CochleagramStatistics(const Cochleagram& cochleagram) {
  const Matrix& values = cochleagram.values;
  Matrix stats(values.rows(), kStatsPerBin);
  for (std::size_t c = 0; c < values.rows(); ++c) {
    StoreRow(stats, c, ComputeBinStatistics(values.row(c)));
  }
  return stats;
}

Matrix StreamingCochleagramStatistics(const audio::AudioClip& clip,
                                      const GammatoneConfig& config) {
  Matrix stats(config.channels, kStatsPerBin);
  ForEachCochleaChannel(clip, config, [&](int c, std::span<const double> row) {
    StoreRow(stats, c, ComputeBinStatistics(row));
  });
  return stats;
}

FeatureVector AssembleFeatureVector(const Matrix& statistics,
                                    const EmbeddingVector& embedding) {
  if (statistics.rows() != kCochleaChannels ||
      statistics.cols() != kStatsPerBin) {
    throw Error(ErrorKind::kContract,
                "feature vector: expected 100x11 statistics, got " +
                    std::to_string(statistics.rows()) + "x" +
                    std::to_string(statistics.cols()));
  }
  if (embedding.values.size() != kEmbeddingDim) {
    throw Error(ErrorKind::kContract,
                "feature vector: expected 256-value embedding, got " +
                    std::to_string(embedding.values.size()));
  }
  FeatureVector out;
  out.values.reserve(kFeatureLength);
  const auto flat = statistics.data();
  out.values.insert(out.values.end(), flat.begin(), flat.end());
  out.values.insert(out.values.end(), embedding.values.begin(),
                    embedding.values.end());
  return out;
}

FeatureVector AssembleFeatureVector(const Cochleagram& cochleagram,
                                    const EmbeddingVector& embedding) {
  if (cochleagram.values.rows() != kCochleaChannels) {
    throw Error(ErrorKind::kContract,
                "feature vector: cochleagram must have 100 channels, got " +
                    std::to_string(cochleagram.values.rows()));
  }
  return AssembleFeatureVector(CochleagramStatistics(cochleagram), embedding);
}

FeatureVector ExtractFeatureVector(const audio::AudioClip& clip,
                                   const EmbeddingProvider& provider,
                                   const GammatoneConfig& config) {
  return AssembleFeatureVector(StreamingCochleagramStatistics(clip, config),
                               Embed(clip, provider));
}

}  // namespace coughscreen::dsp
