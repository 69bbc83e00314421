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

// Logistic classifier over nine self-reported symptoms.
//
// Model document: {"weights": [9 numbers], "bias": number,
//                  "symptom_order": [9 symptom names]}
// Documents whose symptom_order is a permutation of the canonical order are
// reordered on load.

#ifndef COUGHSCREEN_INFERENCE_LOGISTIC_H_
#define COUGHSCREEN_INFERENCE_LOGISTIC_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace coughscreen::inference {

inline constexpr std::size_t kSymptomCount = 9;

// Canonical symptom order; bitmaps and weights are indexed by it.
inline constexpr std::array<std::string_view, kSymptomCount> kSymptomNames = {
    "diarrhoea", "dyspnoea", "sore_throat", "cough",     "rash",
    "fatigue",   "fever",    "anosmia",     "dry_tongue"};

std::optional<std::size_t> SymptomIndex(std::string_view name);

using SymptomBitmap = std::array<bool, kSymptomCount>;

struct LogisticModel {
  std::array<double, kSymptomCount> weights{};
  double bias = 0.0;
};

struct SymptomRecord {
  SymptomBitmap symptoms{};
  bool label = false;
};

struct LogisticTrainingOptions {
  double step_size = 0.1;
  double l2 = 1e-3;
  int max_iterations = 50000;
  double gradient_tolerance = 1e-8;
  // Records the objective before each step and after the last one.
  bool record_loss = false;
};

struct LogisticTrainingResult {
  LogisticModel model;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_history;
};

// Mean log-loss plus (l2 / 2) * |w|^2 (bias unpenalized).
double LogisticObjective(const LogisticModel& model,
                         std::span<const SymptomRecord> records, double l2);

// Deterministic full-batch gradient descent from the zero model. Throws
// Error{kDegenerateInput} unless both classes are present.
LogisticTrainingResult TrainLogistic(std::span<const SymptomRecord> records,
                                     const LogisticTrainingOptions& options = {});

double PredictLogistic(const LogisticModel& model, const SymptomBitmap& symptoms);
// Accepts any length; throws Error{kContract} unless it is 9.
double PredictLogistic(const LogisticModel& model, std::span<const bool> symptoms);

LogisticModel LoadLogisticModel(const nlohmann::json& document);
LogisticModel LoadLogisticModelFile(const std::string& path);
nlohmann::json SaveLogisticModel(const LogisticModel& model);

}  // namespace coughscreen::inference

#endif  // COUGHSCREEN_INFERENCE_LOGISTIC_H_
