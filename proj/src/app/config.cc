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

#include "coughscreen/app/config.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "coughscreen/error.h"
#include "json.hpp"

namespace coughscreen::app {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void ConfigError(const std::string& what) {
  throw Error(ErrorKind::kConfig, "config: " + what);
}

void CheckKnownKeys(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::string Resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

template <typename T>
T Get(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    ConfigError(std::string("'") + key + "' has the wrong type");
  }
}

}  // namespace

std::optional<std::string> ProcessEnv(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

ServiceConfig ParseServiceConfig(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    ConfigError(e.what());
  }
  if (!doc.is_object()) ConfigError("expected a JSON object");
  CheckKnownKeys(doc,
                 {"models", "weights", "symptom_weight", "gate_threshold", "band",
                  "renormalize_missing", "strict_bundles", "storage_path", "listen",
                  "admin_token", "max_upload_bytes", "max_upload_seconds"},
                 "top level");
  ServiceConfig c;
  if (doc.contains("models")) {
    const json& m = doc["models"];
    if (!m.is_object()) ConfigError("'models' must be an object");
    CheckKnownKeys(m,
                   {"detector", "dcnn_bundle", "gb_cough_bundle", "gb_breath_bundle",
                    "gb_voice_bundle", "symptom_model"},
                   "models");
    auto path = [&](const char* key) {
      return Resolve(base_dir, Get<std::string>(m, key, ""));
    };
    c.models.detector = path("detector");
    c.models.dcnn_bundle = path("dcnn_bundle");
    c.models.gb_cough_bundle = path("gb_cough_bundle");
    c.models.gb_breath_bundle = path("gb_breath_bundle");
    c.models.gb_voice_bundle = path("gb_voice_bundle");
    c.models.symptom_model = path("symptom_model");
  }
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    if (w.is_string()) {
      const auto preset = screening::StackingWeights::Preset(w.get<std::string>());
      if (!preset) ConfigError("unknown weight preset '" + w.get<std::string>() + "'");
      c.weights = *preset;
    } else if (w.is_object()) {
      CheckKnownKeys(w, {"t", "x", "y", "z"}, "weights");
      c.weights = {Get<double>(w, "t", 0.0), Get<double>(w, "x", 0.0),
                   Get<double>(w, "y", 0.0), Get<double>(w, "z", 0.0)};
    } else {
      ConfigError("'weights' must be a preset name or an object");
    }
  }
  c.symptom_weight = Get<double>(doc, "symptom_weight", c.symptom_weight);
  c.gate_threshold = Get<double>(doc, "gate_threshold", c.gate_threshold);
  if (doc.contains("band")) {
    const json& b = doc["band"];
    if (!b.is_object()) ConfigError("'band' must be an object");
    CheckKnownKeys(b, {"low", "high"}, "band");
    c.band.low = Get<double>(b, "low", c.band.low);
    c.band.high = Get<double>(b, "high", c.band.high);
  }
  c.renormalize_missing = Get<bool>(doc, "renormalize_missing", c.renormalize_missing);
  c.strict_bundles = Get<bool>(doc, "strict_bundles", c.strict_bundles);
  c.storage_path = Resolve(base_dir, Get<std::string>(doc, "storage_path", ""));
  if (doc.contains("listen")) {
    const json& l = doc["listen"];
    if (!l.is_object()) ConfigError("'listen' must be an object");
    CheckKnownKeys(l, {"host", "port"}, "listen");
    c.host = Get<std::string>(l, "host", c.host);
    c.port = Get<int>(l, "port", c.port);
  }
  c.admin_token = Get<std::string>(doc, "admin_token", c.admin_token);
  c.max_upload_bytes = Get<std::size_t>(doc, "max_upload_bytes", c.max_upload_bytes);
  c.max_upload_seconds = Get<double>(doc, "max_upload_seconds", c.max_upload_seconds);
  ValidateServiceConfig(c, false);
  return c;
}

void ApplyEnvOverrides(ServiceConfig& c, const EnvLookup& env) {
  auto set = [&](const char* name, std::string& field) {
    if (auto v = env(name)) field = *v;
  };
  set("COUGHSCREEN_DETECTOR", c.models.detector);
  set("COUGHSCREEN_DCNN_BUNDLE", c.models.dcnn_bundle);
  set("COUGHSCREEN_GB_COUGH_BUNDLE", c.models.gb_cough_bundle);
  set("COUGHSCREEN_GB_BREATH_BUNDLE", c.models.gb_breath_bundle);
  set("COUGHSCREEN_GB_VOICE_BUNDLE", c.models.gb_voice_bundle);
  set("COUGHSCREEN_SYMPTOM_MODEL", c.models.symptom_model);
  set("COUGHSCREEN_STORAGE_PATH", c.storage_path);
  set("COUGHSCREEN_HOST", c.host);
  set("COUGHSCREEN_ADMIN_TOKEN", c.admin_token);
  if (auto port = env("COUGHSCREEN_PORT")) {
    try {
      std::size_t used = 0;
      c.port = std::stoi(*port, &used);
      if (used != port->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      ConfigError("COUGHSCREEN_PORT is not an integer");
    }
  }
}

ServiceConfig LoadServiceConfig(const std::string& path, const EnvLookup& env) {
  std::ifstream in(path);
  if (!in) ConfigError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string base = fs::path(path).parent_path().string();
  ServiceConfig c = ParseServiceConfig(buf.str(), base.empty() ? "." : base);
  ApplyEnvOverrides(c, env);
  return c;
}

void ValidateServiceConfig(const ServiceConfig& c, bool check_files) {
  auto unit = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) ConfigError(std::string(what) + " must lie in [0, 1]");
  };
  unit(c.gate_threshold, "gate_threshold");
  unit(c.band.low, "band.low");
  unit(c.band.high, "band.high");
  unit(c.symptom_weight, "symptom_weight");
  if (c.band.low > c.band.high) ConfigError("band.low exceeds band.high");
  try {
    c.weights.Validate();
  } catch (const Error& e) {
    ConfigError(e.what());
  }
  if (c.port < 0 || c.port > 65535) ConfigError("port out of range");
  if (c.max_upload_bytes == 0 || !(c.max_upload_seconds > 0.0)) {
    ConfigError("upload limits must be positive");
  }
  if (!check_files) return;
  auto require = [](const std::string& p, const char* what) {
    if (p.empty()) ConfigError(std::string("models.") + what + " is required");
    if (!fs::exists(p)) ConfigError(std::string("models.") + what + ": no file at " + p);
  };
  auto optional = [](const std::string& p, const char* what) {
    if (!p.empty() && !fs::exists(p)) {
      ConfigError(std::string("models.") + what + ": no file at " + p);
    }
  };
  require(c.models.detector, "detector");
  require(c.models.dcnn_bundle, "dcnn_bundle");
  require(c.models.gb_cough_bundle, "gb_cough_bundle");
  optional(c.models.gb_breath_bundle, "gb_breath_bundle");
  optional(c.models.gb_voice_bundle, "gb_voice_bundle");
  optional(c.models.symptom_model, "symptom_model");
}

}  // namespace coughscreen::app
