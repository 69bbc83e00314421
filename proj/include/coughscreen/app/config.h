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

// Service configuration: a JSON file plus environment overrides.
//
//   {
//     "models": {
//       "detector": "detector.json",
//       "dcnn_bundle": "dcnn/bundle.json",
//       "gb_cough_bundle": "gb_cough/bundle.json",
//       "gb_breath_bundle": "gb_breath/bundle.json",   (optional)
//       "gb_voice_bundle": "gb_voice/bundle.json",     (optional)
//       "symptom_model": "symptoms.json"               (optional)
//     },
//     "weights": "variant1" | {"t": .., "x": .., "y": .., "z": ..},
//     "symptom_weight": 0.0,
//     "gate_threshold": 0.25,
//     "band": {"low": 0.45, "high": 0.55},
//     "renormalize_missing": true,
//     "strict_bundles": false,
//     "storage_path": "submissions.ndjson",
//     "listen": {"host": "127.0.0.1", "port": 8080},
//     "admin_token": "",
//     "max_upload_bytes": 10485760,
//     "max_upload_seconds": 30
//   }
//
// Relative paths resolve against the config file's directory. Environment
// variables override: COUGHSCREEN_DETECTOR, COUGHSCREEN_DCNN_BUNDLE,
// COUGHSCREEN_GB_COUGH_BUNDLE, COUGHSCREEN_GB_BREATH_BUNDLE,
// COUGHSCREEN_GB_VOICE_BUNDLE, COUGHSCREEN_SYMPTOM_MODEL,
// COUGHSCREEN_STORAGE_PATH, COUGHSCREEN_HOST, COUGHSCREEN_PORT and
// COUGHSCREEN_ADMIN_TOKEN.

#ifndef COUGHSCREEN_APP_CONFIG_H_
#define COUGHSCREEN_APP_CONFIG_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "coughscreen/screening/screening.h"

namespace coughscreen::app {

struct ModelPaths {
  std::string detector;
  std::string dcnn_bundle;
  std::string gb_cough_bundle;
  std::string gb_breath_bundle;
  std::string gb_voice_bundle;
  std::string symptom_model;
};

struct ServiceConfig {
  ModelPaths models;
  screening::StackingWeights weights = screening::StackingWeights::Variant1();
  double symptom_weight = 0.0;
  double gate_threshold = screening::kDefaultGateThreshold;
  screening::UncertaintyBand band;
  bool renormalize_missing = true;
  bool strict_bundles = false;
  std::string storage_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string admin_token;
  std::size_t max_upload_bytes = 10 * 1024 * 1024;
  double max_upload_seconds = 30.0;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> ProcessEnv(const std::string& name);

// Throws Error{kConfig} for malformed documents or out-of-range values.
ServiceConfig ParseServiceConfig(const std::string& json_text,
                                 const std::string& base_dir = ".");
ServiceConfig LoadServiceConfig(const std::string& path,
                                const EnvLookup& env = ProcessEnv);
void ApplyEnvOverrides(ServiceConfig& config, const EnvLookup& env);

// Ranges, band order and weight sum; with check_files also that every
// configured model file exists.
void ValidateServiceConfig(const ServiceConfig& config, bool check_files = true);

}  // namespace coughscreen::app

#endif  // COUGHSCREEN_APP_CONFIG_H_
