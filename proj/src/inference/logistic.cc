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

#include "coughscreen/inference/logistic.h"

#include <cmath>
#include <fstream>

#include "coughscreen/error.h"
#include "coughscreen/inference/tree_ensemble.h"

namespace coughscreen::inference {
namespace {

using json = nlohmann::json;

double Margin(const LogisticModel& model, const SymptomBitmap& x) {
  double z = model.bias;
  for (std::size_t i = 0; i < kSymptomCount; ++i) {
    if (x[i]) z += model.weights[i];
  }
  return z;
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

std::optional<std::size_t> SymptomIndex(std::string_view name) {
  for (std::size_t i = 0; i < kSymptomCount; ++i) {
    if (kSymptomNames[i] == name) return i;
  }
  return std::nullopt;
}

double LogisticObjective(const LogisticModel& model,
                         std::span<const SymptomRecord> records, double l2) {
  double loss = 0.0;
  for (const auto& r : records) {
    const double z = Margin(model, r.symptoms);
    // -log sigmoid(z) = softplus(-z); -log(1 - sigmoid(z)) = softplus(z)
    loss += r.label ? Softplus(-z) : Softplus(z);
  }
  loss /= static_cast<double>(records.size());
  double penalty = 0.0;
  for (double w : model.weights) penalty += w * w;
  return loss + 0.5 * l2 * penalty;
}

LogisticTrainingResult TrainLogistic(std::span<const SymptomRecord> records,
                                     const LogisticTrainingOptions& options) {
  std::size_t positives = 0;
  for (const auto& r : records) positives += r.label ? 1 : 0;
  if (positives == 0 || positives == records.size()) {
    throw Error(ErrorKind::kDegenerateInput,
                "train_logistic: need at least one record of each class");
  }

  LogisticTrainingResult result;
  LogisticModel& model = result.model;
  const double n = static_cast<double>(records.size());
  for (int it = 0; it < options.max_iterations; ++it) {
    if (options.record_loss) {
      result.loss_history.push_back(LogisticObjective(model, records, options.l2));
    }
    std::array<double, kSymptomCount> grad{};
    double grad_bias = 0.0;
    for (const auto& r : records) {
      const double residual = Sigmoid(Margin(model, r.symptoms)) - (r.label ? 1.0 : 0.0);
      grad_bias += residual;
      for (std::size_t i = 0; i < kSymptomCount; ++i) {
        if (r.symptoms[i]) grad[i] += residual;
      }
    }
    double norm2 = 0.0;
    grad_bias /= n;
    norm2 += grad_bias * grad_bias;
    for (std::size_t i = 0; i < kSymptomCount; ++i) {
      grad[i] = grad[i] / n + options.l2 * model.weights[i];
      norm2 += grad[i] * grad[i];
    }
    if (std::sqrt(norm2) < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    model.bias -= options.step_size * grad_bias;
    for (std::size_t i = 0; i < kSymptomCount; ++i) {
      model.weights[i] -= options.step_size * grad[i];
    }
    result.iterations = it + 1;
  }
  if (options.record_loss) {
    result.loss_history.push_back(LogisticObjective(model, records, options.l2));
  }
  return result;
}

double PredictLogistic(const LogisticModel& model, const SymptomBitmap& symptoms) {
  return Sigmoid(Margin(model, symptoms));
}

double PredictLogistic(const LogisticModel& model, std::span<const bool> symptoms) {
  if (symptoms.size() != kSymptomCount) {
    throw Error(ErrorKind::kContract,
                "predict_logistic: expected 9 symptoms, got " +
                    std::to_string(symptoms.size()));
  }
  SymptomBitmap bitmap{};
  std::copy(symptoms.begin(), symptoms.end(), bitmap.begin());
  return PredictLogistic(model, bitmap);
}

LogisticModel LoadLogisticModel(const json& document) {
  auto fail = [](const std::string& what) -> Error {
    return Error(ErrorKind::kSchema, "logistic model: " + what);
  };
  if (!document.is_object()) throw fail("document must be an object");
  for (const auto& [key, value] : document.items()) {
    if (key != "weights" && key != "bias" && key != "symptom_order") {
      throw fail("unknown key '" + key + "'");
    }
  }
  if (!document.contains("weights") || !document["weights"].is_array() ||
      document["weights"].size() != kSymptomCount) {
    throw fail("'weights' must be an array of 9 numbers");
  }
  if (!document.contains("bias") || !document["bias"].is_number()) {
    throw fail("'bias' must be a number");
  }
  std::array<std::size_t, kSymptomCount> slot{};
  for (std::size_t i = 0; i < kSymptomCount; ++i) slot[i] = i;
  if (document.contains("symptom_order")) {
    const json& order = document["symptom_order"];
    if (!order.is_array() || order.size() != kSymptomCount) {
      throw fail("'symptom_order' must list 9 symptoms");
    }
    std::array<bool, kSymptomCount> used{};
    for (std::size_t i = 0; i < kSymptomCount; ++i) {
      if (!order[i].is_string()) throw fail("'symptom_order' entries must be strings");
      const auto idx = SymptomIndex(order[i].get<std::string>());
      if (!idx || used[*idx]) {
        throw fail("'symptom_order' must be a permutation of the 9 known symptoms");
      }
      used[*idx] = true;
      slot[i] = *idx;
    }
  }
  LogisticModel model;
  for (std::size_t i = 0; i < kSymptomCount; ++i) {
    if (!document["weights"][i].is_number()) throw fail("weights must be numbers");
    model.weights[slot[i]] = document["weights"][i].get<double>();
  }
  model.bias = document["bias"].get<double>();
  return model;
}

LogisticModel LoadLogisticModelFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kLoad, "logistic model: cannot open " + path);
  try {
    return LoadLogisticModel(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, "logistic model: " + path + ": " + e.what());
  }
}

json SaveLogisticModel(const LogisticModel& model) {
  json order = json::array();
  for (auto name : kSymptomNames) order.push_back(std::string(name));
  return {{"weights", model.weights}, {"bias", model.bias}, {"symptom_order", order}};
}

}  // namespace coughscreen::inference
