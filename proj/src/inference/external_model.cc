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

#include "coughscreen/inference/external_model.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "coughscreen/error.h"
#include "coughscreen/inference/tree_ensemble.h"
#include "json.hpp"

namespace coughscreen::inference {
namespace {

using json = nlohmann::json;

class PooledLinearBackend : public ExternalModelBackend {
 public:
  PooledLinearBackend(std::vector<double> weights, double bias, bool thread_safe)
      : weights_(std::move(weights)), bias_(bias), thread_safe_(thread_safe) {}

  double Run(const dsp::MelSpectrogram& input) const override {
    if (input.n_mels() != weights_.size()) {
      throw Error(ErrorKind::kContract, "pooled-linear: expected " +
                                            std::to_string(weights_.size()) +
                                            " Mel rows");
    }
    double z = bias_;
    for (std::size_t r = 0; r < weights_.size(); ++r) {
      double mean = 0.0;
      for (double v : input.values.row(r)) mean += v;
      z += weights_[r] * mean / static_cast<double>(input.frames());
    }
    return z;
  }
  bool thread_safe() const override { return thread_safe_; }

 private:
  std::vector<double> weights_;
  double bias_;
  bool thread_safe_;
};

class SerialConstantBackend : public ConstantBackend {
 public:
  using ConstantBackend::ConstantBackend;
  bool thread_safe() const override { return false; }
};

}  // namespace

std::string TensorShape::ToString() const {
  return std::to_string(channels) + "x" + std::to_string(rows) + "x" +
         std::to_string(cols);
}

TensorShape ShapeOf(const dsp::MelSpectrogram& spec) {
  return {spec.has_positional() ? 2u : 1u, spec.n_mels(), spec.frames()};
}

TensorShape ClassifierInputShape() {
  return {2, dsp::kMelBins, dsp::kClassifierFrames};
}

TensorShape DetectorInputShape() { return {1, dsp::kMelBins, dsp::kDetectorFrames}; }

ExternalModelHandle::ExternalModelHandle(
    std::string id, TensorShape input_shape,
    std::shared_ptr<const ExternalModelBackend> backend,
    OutputActivation activation)
    : id_(std::move(id)),
      shape_(input_shape),
      activation_(activation),
      backend_(std::move(backend)) {
  if (backend_ && !backend_->thread_safe()) serial_ = std::make_shared<std::mutex>();
}

ExternalModelHandle ExternalModelHandle::Unloaded(std::string id,
                                                  TensorShape input_shape) {
  return ExternalModelHandle(std::move(id), input_shape, nullptr);
}

double RunExternalModel(const ExternalModelHandle& handle,
                        const dsp::MelSpectrogram& input) {
  if (!handle.loaded()) {
    throw Error(ErrorKind::kLoad, "model '" + handle.id() + "' is not loaded");
  }
  const TensorShape got = ShapeOf(input);
  if (got != handle.input_shape()) {
    throw Error(ErrorKind::kContract, "model '" + handle.id() + "' expects " +
                                          handle.input_shape().ToString() +
                                          " input, got " + got.ToString());
  }
  double raw;
  try {
    if (handle.serial_) {
      std::lock_guard<std::mutex> lock(*handle.serial_);
      raw = handle.backend_->Run(input);
    } else {
      raw = handle.backend_->Run(input);
    }
  } catch (const Error& e) {
    throw Error(e.kind() == ErrorKind::kContract ? ErrorKind::kContract
                                                 : ErrorKind::kRuntime,
                "model '" + handle.id() + "': " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kRuntime, "model '" + handle.id() + "': " + e.what());
  }
  const double p =
      handle.activation() == OutputActivation::kSigmoid ? Sigmoid(raw) : raw;
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::kContract, "model '" + handle.id() +
                                          "' produced non-probability output " +
                                          std::to_string(p));
  }
  return p;
}

ExternalModelHandle LoadExternalModel(const std::string& id,
                                      const std::string& path,
                                      const TensorShape& input_shape) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) {
    throw Error(ErrorKind::kLoad, "model '" + id + "': missing artifact " + path);
  }
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".onnx") {
    throw Error(ErrorKind::kLoad,
                "model '" + id + "': " + path +
                    ": no neural-network runtime backend is linked into this build");
  }
  if (ext != ".json") {
    throw Error(ErrorKind::kLoad,
                "model '" + id + "': unsupported artifact type '" + ext + "'");
  }
  json doc;
  try {
    std::ifstream in(path);
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kLoad, "model '" + id + "': " + path + ": " + e.what());
  }
  const std::string format = doc.value("format", "");
  const bool thread_safe = doc.value("thread_safe", true);
  if (format == "constant") {
    const double p = doc.value("probability", -1.0);
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::kLoad, "model '" + id + "': probability must be in [0,1]");
    }
    std::shared_ptr<const ExternalModelBackend> backend =
        thread_safe ? std::make_shared<ConstantBackend>(p)
                    : std::make_shared<SerialConstantBackend>(p);
    return ExternalModelHandle(id, input_shape, std::move(backend));
  }
  if (format == "pooled-linear") {
    if (!doc.contains("weights") || !doc["weights"].is_array() ||
        doc["weights"].size() != input_shape.rows) {
      throw Error(ErrorKind::kLoad, "model '" + id + "': pooled-linear needs " +
                                        std::to_string(input_shape.rows) +
                                        " weights");
    }
    const std::string activation = doc.value("activation", "sigmoid");
    if (activation != "sigmoid" && activation != "identity") {
      throw Error(ErrorKind::kLoad,
                  "model '" + id + "': unknown activation '" + activation + "'");
    }
    auto backend = std::make_shared<PooledLinearBackend>(
        doc["weights"].get<std::vector<double>>(), doc.value("bias", 0.0),
        thread_safe);
    return ExternalModelHandle(id, input_shape, std::move(backend),
                               activation == "sigmoid" ? OutputActivation::kSigmoid
                                                       : OutputActivation::kIdentity);
  }
  throw Error(ErrorKind::kLoad, "model '" + id + "': unknown format '" + format + "'");
}

}  // namespace coughscreen::inference
