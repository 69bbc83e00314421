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

// Binary classification metrics: ROC AUC, MCC, ROC curves.

#ifndef COUGHSCREEN_EVALUATION_METRICS_H_
#define COUGHSCREEN_EVALUATION_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace coughscreen::evaluation {

struct LabeledScores {
  std::vector<double> scores;
  std::vector<int> labels;  // 0 or 1

  std::size_t size() const { return scores.size(); }
  std::size_t positives() const;
  std::size_t negatives() const { return size() - positives(); }
  // Throws Error{kInvalidArgument} on a length mismatch, a label outside
  // {0,1} or a non-finite score.
  void Validate() const;
};

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Twice the Mann-Whitney U statistic: 2 * #(pos > neg) + #(pos == neg).
// Integer-valued, so comparisons between score sets are exact.
std::uint64_t MannWhitneyTwiceU(const LabeledScores& data);

// P(score+ > score-) + P(tie) / 2. Error{kUndefined} for single-class input.
double RocAuc(const LabeledScores& data);

// 0 when any factor of the denominator is 0.
double Mcc(const ConfusionCounts& counts);

// prediction = score >= threshold.
ConfusionCounts Binarize(const LabeledScores& data, double threshold = 0.5);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

// One vertex per distinct threshold, from (0,0) to (1,1).
RocCurve ComputeRocCurve(const LabeledScores& data);

double TrapezoidArea(const RocCurve& curve);

inline constexpr std::size_t kMeanRocGridPoints = 101;

// TPR of a staircase curve at a given FPR; at a vertical segment the upper
// end is taken.
double InterpolateTpr(const RocCurve& curve, double fpr);

// Resamples every curve onto an evenly spaced FPR grid and averages TPR
// pointwise. The result starts at (0,0) and ends at (1,1).
RocCurve MeanRoc(const std::vector<RocCurve>& curves,
                 std::size_t grid_points = kMeanRocGridPoints);

// "fpr,tpr" header then one row per point.
std::string RocCurveCsv(const RocCurve& curve);

}  // namespace coughscreen::evaluation

#endif  // COUGHSCREEN_EVALUATION_METRICS_H_
