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

// End-to-end screening: gate the cough, evaluate every available branch,
// stack the audio branches, mix in the symptom model and band the result.

#ifndef COUGHSCREEN_SCREENING_PIPELINE_H_
#define COUGHSCREEN_SCREENING_PIPELINE_H_

#include <memory>
#include <optional>
#include <vector>

#include "coughscreen/audio/audio.h"
#include "coughscreen/dsp/embedding.h"
#include "coughscreen/dsp/gammatone.h"
#include "coughscreen/inference/bagging.h"
#include "coughscreen/inference/external_model.h"
#include "coughscreen/inference/logistic.h"
#include "coughscreen/screening/screening.h"

namespace coughscreen::screening {

// Everything the pipeline evaluates. Immutable once built; shared across
// request handlers.
struct ModelRegistry {
  inference::ExternalModelHandle detector;
  inference::NetworkBundle dcnn{inference::BranchKind::kSpectrogram, {}};
  inference::TreeBundle gb_cough{inference::BranchKind::kCough, {}};
  inference::TreeBundle gb_breath{inference::BranchKind::kBreath, {}};
  inference::TreeBundle gb_voice{inference::BranchKind::kVoice, {}};
  std::optional<inference::LogisticModel> symptom_model;
  std::shared_ptr<const dsp::EmbeddingProvider> embedding;
  dsp::GammatoneConfig gammatone;
};

struct SessionInputs {
  audio::AudioClip cough;
  std::optional<audio::AudioClip> breath;
  std::optional<audio::AudioClip> voice;
  std::optional<inference::SymptomBitmap> symptoms;
};

struct PipelineOptions {
  StackingWeights weights = StackingWeights::Variant1();
  // Convex mix of the symptom model into the audio stack; 0 reproduces the
  // published weight rows exactly. Ignored when symptoms are absent.
  double symptom_weight = 0.0;
  double gate_threshold = kDefaultGateThreshold;
  UncertaintyBand band;
  bool renormalize_missing = true;
  // Evaluate branches on worker threads. Results are identical either way.
  bool parallel = false;
};

struct PipelineResult {
  GateDecision gate;
  // Set only when the gate accepted the cough.
  std::optional<Verdict> verdict;
  ComponentProbabilities branches;
  std::optional<double> audio_probability;
  std::optional<double> symptom_probability;
  std::optional<double> final_probability;
  // True when the caller should ask for another cough recording (gate
  // rejection or an uncertain verdict).
  bool retry_suggested = false;
};

// Throws Error{kConfig} when a model required for the supplied inputs is
// missing from the registry.
void CheckRegistry(const ModelRegistry& registry, const SessionInputs& inputs,
                   const PipelineOptions& options);

// Branch evaluation for an already-accepted cough; exposed so the service
// can reuse a stored gate decision.
PipelineResult EvaluateAccepted(const SessionInputs& inputs,
                                const ModelRegistry& registry,
                                const PipelineOptions& options,
                                const GateDecision& gate);

PipelineResult RunFullPipeline(const SessionInputs& inputs,
                               const ModelRegistry& registry,
                               const PipelineOptions& options = {});

}  // namespace coughscreen::screening

#endif  // COUGHSCREEN_SCREENING_PIPELINE_H_
