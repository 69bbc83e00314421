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

#include "coughscreen/app/registry.h"

#include "coughscreen/dsp/embedding.h"

namespace coughscreen::app {

std::shared_ptr<const screening::ModelRegistry> BuildRegistry(const ServiceConfig& c) {
  ValidateServiceConfig(c);
  auto r = std::make_shared<screening::ModelRegistry>();
  r->detector = inference::LoadExternalModel("detector", c.models.detector,
                                             inference::DetectorInputShape());
  r->dcnn = inference::LoadNetworkBundle(c.models.dcnn_bundle,
                                         inference::ClassifierInputShape(),
                                         c.strict_bundles);
  r->gb_cough = inference::LoadTreeBundle(c.models.gb_cough_bundle, c.strict_bundles);
  if (!c.models.gb_breath_bundle.empty()) {
    r->gb_breath = inference::LoadTreeBundle(c.models.gb_breath_bundle, c.strict_bundles);
  }
  if (!c.models.gb_voice_bundle.empty()) {
    r->gb_voice = inference::LoadTreeBundle(c.models.gb_voice_bundle, c.strict_bundles);
  }
  if (!c.models.symptom_model.empty()) {
    r->symptom_model = inference::LoadLogisticModelFile(c.models.symptom_model);
  }
  r->embedding = dsp::MakeConcurrencySafe(std::make_shared<dsp::LogMelFrameProvider>());
  return r;
}

screening::PipelineOptions PipelineOptionsFrom(const ServiceConfig& c) {
  screening::PipelineOptions o;
  o.weights = c.weights;
  o.symptom_weight = c.symptom_weight;
  o.gate_threshold = c.gate_threshold;
  o.band = c.band;
  o.renormalize_missing = c.renormalize_missing;
  return o;
}

}  // namespace coughscreen::app
