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

#include "coughscreen/evaluation/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "coughscreen/error.h"

namespace coughscreen::evaluation {
namespace {

std::vector<std::size_t> OrderByScoreDescending(const LabeledScores& data) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.scores[a] > data.scores[b];
  });
  return order;
}

void RequireBothClasses(const LabeledScores& data, const char* what) {
  data.Validate();
  const std::size_t pos = data.positives();
  if (pos == 0 || pos == data.size()) {
    throw Error(ErrorKind::kUndefined,
                std::string(what) + " is undefined without both classes");
  }
}

}  // namespace

std::size_t LabeledScores::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void LabeledScores::Validate() const {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kInvalidArgument, "scores and labels differ in length");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorKind::kInvalidArgument,
                  "label at index " + std::to_string(i) + " is not 0 or 1");
    }
    if (!std::isfinite(scores[i])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "score at index " + std::to_string(i) + " is not finite");
    }
  }
}

std::uint64_t MannWhitneyTwiceU(const LabeledScores& data) {
  RequireBothClasses(data, "ROC AUC");
  const auto order = OrderByScoreDescending(data);
  // Walk tie groups from the top; every positive beats the negatives that
  // come in later groups.
  std::uint64_t negatives_below = data.negatives();
  std::uint64_t twice_u = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    while (j < order.size() && data.scores[order[j]] == data.scores[order[i]]) {
      (data.labels[order[j]] == 1 ? pos : neg) += 1;
      ++j;
    }
    negatives_below -= neg;
    twice_u += 2 * pos * negatives_below + pos * neg;
    i = j;
  }
  return twice_u;
}

double RocAuc(const LabeledScores& data) {
  const std::uint64_t twice_u = MannWhitneyTwiceU(data);
  const double pairs = static_cast<double>(data.positives()) *
                       static_cast<double>(data.negatives());
  return static_cast<double>(twice_u) / (2.0 * pairs);
}

double Mcc(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double a = tp + fp;
  const double b = tp + fn;
  const double d = tn + fp;
  const double e = tn + fn;
  if (a == 0.0 || b == 0.0 || d == 0.0 || e == 0.0) return 0.0;
  const double r = (tp * tn - fp * fn) / std::sqrt(a * b * d * e);
  return std::clamp(r, -1.0, 1.0);
}

ConfusionCounts Binarize(const LabeledScores& data, double threshold) {
  data.Validate();
  ConfusionCounts c;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool predicted = data.scores[i] >= threshold;
    const bool actual = data.labels[i] == 1;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

RocCurve ComputeRocCurve(const LabeledScores& data) {
  RequireBothClasses(data, "ROC curve");
  const auto order = OrderByScoreDescending(data);
  const double p = static_cast<double>(data.positives());
  const double n = static_cast<double>(data.negatives());
  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && data.scores[order[j]] == data.scores[order[i]]) {
      (data.labels[order[j]] == 1 ? tp : fp) += 1;
      ++j;
    }
    curve.points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
    i = j;
  }
  // Counts reach the class totals at the last group, so the final vertex is
  // exactly (1,1).
  return curve;
}

double TrapezoidArea(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i - 1];
    const RocPoint& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

double InterpolateTpr(const RocCurve& curve, double fpr) {
  const auto& pts = curve.points;
  if (pts.empty()) throw Error(ErrorKind::kInvalidArgument, "empty ROC curve");
  // Last vertex with fpr <= target is the top of any vertical segment there.
  auto upper = std::upper_bound(pts.begin(), pts.end(), fpr,
                                [](double f, const RocPoint& p) { return f < p.fpr; });
  if (upper == pts.begin()) return pts.front().tpr;
  const RocPoint& left = *(upper - 1);
  if (upper == pts.end() || left.fpr == fpr) return left.tpr;
  const RocPoint& right = *upper;
  const double t = (fpr - left.fpr) / (right.fpr - left.fpr);
  return left.tpr + t * (right.tpr - left.tpr);
}

RocCurve MeanRoc(const std::vector<RocCurve>& curves, std::size_t grid_points) {
  if (curves.empty()) throw Error(ErrorKind::kInvalidArgument, "mean ROC of no curves");
  if (grid_points < 2) {
    throw Error(ErrorKind::kInvalidArgument, "mean ROC grid needs at least 2 points");
  }
  RocCurve mean;
  mean.points.push_back({0.0, 0.0});
  const double k = static_cast<double>(curves.size());
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double f = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    double sum = 0.0;
    for (const auto& c : curves) sum += InterpolateTpr(c, f);
    mean.points.push_back({f, std::min(1.0, sum / k)});
  }
  mean.points.back().tpr = 1.0;
  return mean;
}

std::string RocCurveCsv(const RocCurve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "fpr,tpr\n";
  for (const auto& p : curve.points) out << p.fpr << ',' << p.tpr << '\n';
  return out.str();
}

}  // namespace coughscreen::evaluation
