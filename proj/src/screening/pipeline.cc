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

#include "coughscreen/screening/pipeline.h"

#include <future>

#include "coughscreen/dsp/features.h"
#include "coughscreen/dsp/mel.h"
#include "coughscreen/error.h"

namespace coughscreen::screening {
namespace {

using inference::BaggedPredict;

double EvaluateSpectrogramBranch(const audio::AudioClip& canonical,
                                 const ModelRegistry& registry) {
  const dsp::MelSpectrogram mel = dsp::FitTimeAxis(
      dsp::ClassifierMelSpectrogram(canonical), dsp::kClassifierFrames);
  return BaggedPredict(registry.dcnn, mel);
}

double EvaluateTreeBranch(const audio::AudioClip& canonical,
                          const inference::TreeBundle& bundle,
                          const ModelRegistry& registry) {
  const dsp::FeatureVector features =
      dsp::ExtractFeatureVector(canonical, *registry.embedding, registry.gammatone);
  return BaggedPredict(bundle, features.values);
}

// Breath and voice recordings that are empty or silent carry no signal and
// are treated as not supplied.
std::optional<audio::AudioClip> CanonicalOrNothing(
    const std::optional<audio::AudioClip>& clip) {
  if (!clip || clip->empty() || audio::IsSilent(*clip)) return std::nullopt;
  return audio::Canonicalize(*clip);
}

}  // namespace

void CheckRegistry(const ModelRegistry& registry, const SessionInputs& inputs,
                   const PipelineOptions& options) {
  auto missing = [](const std::string& what) {
    return Error(ErrorKind::kConfig, "model registry: missing " + what);
  };
  if (!registry.detector.loaded()) throw missing("cough detector");
  if (registry.dcnn.members.empty()) throw missing("spectrogram network bundle");
  if (registry.gb_cough.members.empty()) throw missing("cough tree bundle");
  if (!registry.embedding) throw missing("embedding provider");
  if (inputs.breath && options.weights.y > 0 && registry.gb_breath.members.empty()) {
    throw missing("breath tree bundle");
  }
  if (inputs.voice && options.weights.z > 0 && registry.gb_voice.members.empty()) {
    throw missing("voice tree bundle");
  }
  if (inputs.symptoms && options.symptom_weight > 0 && !registry.symptom_model) {
    throw missing("symptom model");
  }
  if (!(options.symptom_weight >= 0.0 && options.symptom_weight <= 1.0)) {
    throw Error(ErrorKind::kConfig, "symptom_weight must lie in [0, 1]");
  }
}

PipelineResult EvaluateAccepted(const SessionInputs& inputs,
                                const ModelRegistry& registry,
                                const PipelineOptions& options,
                                const GateDecision& gate) {
  CheckRegistry(registry, inputs, options);
  PipelineResult result;
  result.gate = gate;

  const audio::AudioClip cough = audio::Canonicalize(inputs.cough);
  const auto breath = options.weights.y > 0 ? CanonicalOrNothing(inputs.breath)
                                            : std::nullopt;
  const auto voice = options.weights.z > 0 ? CanonicalOrNothing(inputs.voice)
                                           : std::nullopt;

  // Each task writes only its own slot, so completion order cannot change
  // the result.
  std::vector<std::function<void()>> tasks;
  ComponentProbabilities& p = result.branches;
  if (options.weights.t > 0) {
    tasks.emplace_back([&] { p.dcnn = EvaluateSpectrogramBranch(cough, registry); });
  }
  if (options.weights.x > 0) {
    tasks.emplace_back(
        [&] { p.gb = EvaluateTreeBranch(cough, registry.gb_cough, registry); });
  }
  if (breath) {
    tasks.emplace_back(
        [&] { p.gb_breath = EvaluateTreeBranch(*breath, registry.gb_breath, registry); });
  }
  if (voice) {
    tasks.emplace_back(
        [&] { p.gb_voice = EvaluateTreeBranch(*voice, registry.gb_voice, registry); });
  }
  if (options.parallel) {
    std::vector<std::future<void>> running;
    for (auto& task : tasks) running.push_back(std::async(std::launch::async, task));
    for (auto& f : running) f.get();
  } else {
    for (auto& task : tasks) task();
  }

  const double p_audio =
      StackProbabilities(p, options.weights, options.renormalize_missing);
  result.audio_probability = p_audio;

  double s = 0.0;
  if (inputs.symptoms && registry.symptom_model) {
    result.symptom_probability =
        inference::PredictLogistic(*registry.symptom_model, *inputs.symptoms);
    s = options.symptom_weight;
  }
  const double p_final =
      s > 0.0 ? (1.0 - s) * p_audio + s * *result.symptom_probability : p_audio;
  result.final_probability = p_final;
  result.verdict = ScreeningVerdict(p_final, options.band);
  result.retry_suggested = result.verdict->band == Band::kUncertain;
  return result;
}

PipelineResult RunFullPipeline(const SessionInputs& inputs,
                               const ModelRegistry& registry,
                               const PipelineOptions& options) {
  CheckRegistry(registry, inputs, options);
  const GateDecision gate =
      GateRecording(inputs.cough, registry.detector, options.gate_threshold);
  if (!gate.accepted) {
    PipelineResult result;
    result.gate = gate;
    result.retry_suggested = true;
    return result;
  }
  return EvaluateAccepted(inputs, registry, options, gate);
}

}  // namespace coughscreen::screening
