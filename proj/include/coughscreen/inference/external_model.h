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

// Adapter contract for externally trained networks (spectrogram classifier,
// cough detector) that consume a MelSpectrogram and emit one probability.
//
// Artifacts are resolved by file extension:
//   *.onnx  neural-network interchange files; requires an inference runtime
//           backend, which this build does not link, so loading fails with
//           Error{kLoad}.
//   *.json  portable stand-ins:
//           {"format": "constant", "probability": p}
//           {"format": "pooled-linear", "weights": [n_mels numbers],
//            "bias": b, "activation": "sigmoid" | "identity"}
//           pooled-linear averages each Mel row of channel 0 over time and
//           applies an affine map plus activation.
//   Both may carry "thread_safe": false to force serialized access.

#ifndef COUGHSCREEN_INFERENCE_EXTERNAL_MODEL_H_
#define COUGHSCREEN_INFERENCE_EXTERNAL_MODEL_H_

#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "coughscreen/dsp/mel.h"

namespace coughscreen::inference {

struct TensorShape {
  std::size_t channels = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
  std::string ToString() const;
};

TensorShape ShapeOf(const dsp::MelSpectrogram& spec);

// 2 x 128 x 571: log-Mel plus positional channel, 8 s of frames.
TensorShape ClassifierInputShape();
// 1 x 128 x 512.
TensorShape DetectorInputShape();

enum class OutputActivation { kIdentity, kSigmoid };

class ExternalModelBackend {
 public:
  virtual ~ExternalModelBackend() = default;
  // Raw model output; the handle applies the activation.
  virtual double Run(const dsp::MelSpectrogram& input) const = 0;
  virtual bool thread_safe() const { return true; }
};

class ConstantBackend : public ExternalModelBackend {
 public:
  explicit ConstantBackend(double value) : value_(value) {}
  double Run(const dsp::MelSpectrogram&) const override { return value_; }

 private:
  double value_;
};

// Wraps a callable; handy for tests that count invocations.
class FunctionBackend : public ExternalModelBackend {
 public:
  using Fn = std::function<double(const dsp::MelSpectrogram&)>;
  explicit FunctionBackend(Fn fn, bool thread_safe = true)
      : fn_(std::move(fn)), thread_safe_(thread_safe) {}
  double Run(const dsp::MelSpectrogram& input) const override { return fn_(input); }
  bool thread_safe() const override { return thread_safe_; }

 private:
  Fn fn_;
  bool thread_safe_;
};

class ExternalModelHandle {
 public:
  ExternalModelHandle() = default;
  ExternalModelHandle(std::string id, TensorShape input_shape,
                      std::shared_ptr<const ExternalModelBackend> backend,
                      OutputActivation activation = OutputActivation::kIdentity);

  // A handle with an identity and contract but no backend; running it
  // fails with Error{kLoad}.
  static ExternalModelHandle Unloaded(std::string id, TensorShape input_shape);

  const std::string& id() const { return id_; }
  const TensorShape& input_shape() const { return shape_; }
  OutputActivation activation() const { return activation_; }
  bool loaded() const { return backend_ != nullptr; }

  friend double RunExternalModel(const ExternalModelHandle& handle,
                                 const dsp::MelSpectrogram& input);

 private:
  std::string id_;
  TensorShape shape_;
  OutputActivation activation_ = OutputActivation::kIdentity;
  std::shared_ptr<const ExternalModelBackend> backend_;
  // Present only for backends that are not thread safe.
  std::shared_ptr<std::mutex> serial_;
};

// Checks the input shape, runs the backend, applies the activation and
// checks the result lies in [0, 1]. Errors: Error{kLoad} for an unloaded
// handle, Error{kContract} for shape or range violations, Error{kRuntime}
// (message prefixed with the handle id) for backend failures.
double RunExternalModel(const ExternalModelHandle& handle,
                        const dsp::MelSpectrogram& input);

// Loads an artifact per the rules above. Throws Error{kLoad} for missing or
// unsupported files.
ExternalModelHandle LoadExternalModel(const std::string& id,
                                      const std::string& path,
                                      const TensorShape& input_shape);

}  // namespace coughscreen::inference

#endif  // COUGHSCREEN_INFERENCE_EXTERNAL_MODEL_H_
