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

// Per-fold metric reports for cross-validation runs.

#ifndef COUGHSCREEN_EVALUATION_REPORT_H_
#define COUGHSCREEN_EVALUATION_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "coughscreen/evaluation/kfold.h"
#include "coughscreen/evaluation/metrics.h"

namespace coughscreen::evaluation {

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t items = 0;
  std::size_t positives = 0;
  // Absent when the fold holds a single class.
  std::optional<double> auc;
  double mcc = 0.0;
  ConfusionCounts counts;
  std::optional<RocCurve> roc;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

struct CrossValidationReport {
  std::size_t k = 0;
  double threshold = 0.5;
  std::vector<FoldMetrics> folds;
  Summary auc;
  Summary mcc;
  std::optional<RocCurve> mean_roc;
};

// Scores every fold of the plan as a held-out set.
CrossValidationReport EvaluateFolds(const LabeledScores& data, const FoldPlan& plan,
                                    double threshold = 0.5);

std::string ReportJson(const CrossValidationReport& report);

}  // namespace coughscreen::evaluation

#endif  // COUGHSCREEN_EVALUATION_REPORT_H_
