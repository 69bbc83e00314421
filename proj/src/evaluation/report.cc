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

#include "coughscreen/evaluation/report.h"

#include <cmath>

#include "coughscreen/error.h"
#include "json.hpp"

namespace coughscreen::evaluation {
namespace {

Summary Summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

nlohmann::json SummaryJson(const Summary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"folds", s.count}};
}

}  // namespace

CrossValidationReport EvaluateFolds(const LabeledScores& data, const FoldPlan& plan,
                                    double threshold) {
  data.Validate();
  if (plan.assignments.size() != data.size()) {
    throw Error(ErrorKind::kInvalidArgument, "fold plan does not cover the scores");
  }
  CrossValidationReport report;
  report.k = plan.k;
  report.threshold = threshold;
  std::vector<double> aucs;
  std::vector<double> mccs;
  std::vector<RocCurve> curves;
  for (std::size_t f = 0; f < plan.k; ++f) {
    LabeledScores fold;
    for (std::size_t i : plan.FoldMembers(f)) {
      fold.scores.push_back(data.scores[i]);
      fold.labels.push_back(data.labels[i]);
    }
    FoldMetrics m;
    m.fold = f;
    m.items = fold.size();
    m.positives = fold.positives();
    m.counts = Binarize(fold, threshold);
    m.mcc = Mcc(m.counts);
    mccs.push_back(m.mcc);
    if (m.positives > 0 && m.positives < m.items) {
      m.auc = RocAuc(fold);
      m.roc = ComputeRocCurve(fold);
      aucs.push_back(*m.auc);
      curves.push_back(*m.roc);
    }
    report.folds.push_back(std::move(m));
  }
  report.auc = Summarize(aucs);
  report.mcc = Summarize(mccs);
  if (!curves.empty()) report.mean_roc = MeanRoc(curves);
  return report;
}

std::string ReportJson(const CrossValidationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"items", f.items},
                     {"positives", f.positives},
                     {"auc", f.auc ? nlohmann::json(*f.auc) : nlohmann::json(nullptr)},
                     {"mcc", f.mcc},
                     {"tp", f.counts.tp},
                     {"tn", f.counts.tn},
                     {"fp", f.counts.fp},
                     {"fn", f.counts.fn}});
  }
  nlohmann::json doc = {{"k", report.k},
                        {"threshold", report.threshold},
                        {"folds", folds},
                        {"auc", SummaryJson(report.auc)},
                        {"mcc", SummaryJson(report.mcc)}};
  return doc.dump(2);
}

}  // namespace coughscreen::evaluation
