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

#include "coughscreen/app/service.h"

#include <spdlog/spdlog.h>

#include <chrono>
#include <csignal>
#include <limits>
#include <cstdio>
#include <random>

#include "coughscreen/app/registry.h"
#include "coughscreen/error.h"
#include "coughscreen/evaluation/distribution.h"
#include "coughscreen/sessions/analytics.h"
#include "httplib.h"

namespace coughscreen::app {
namespace {

using json = nlohmann::json;

ApiResponse Fail(int status, const std::string& message) {
  return {status, json{{"error", message}}};
}

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json AllowedSymptoms() {
  json names = json::array();
  for (auto n : inference::kSymptomNames) names.push_back(std::string(n));
  return names;
}

json HistogramJson(const evaluation::ProbabilityHistogram& h) {
  return {{"bin_width", h.bin_width()}, {"counts", h.counts}, {"markers", h.markers}};
}

json GateJson(const screening::GateDecision& g) {
  return {{"score", g.score},
          {"threshold", g.threshold},
          {"accepted", g.accepted},
          {"reason", g.reason}};
}

int StatusForError(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kDecode:
    case ErrorKind::kEmptyInput:
    case ErrorKind::kTooShort:
    case ErrorKind::kDegenerateInput:
      return 422;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kSchema:
      return 400;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kConflict:
      return 409;
    default:
      return 500;
  }
}

}  // namespace

sessions::TimestampMs SystemClockMs() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

struct ScreeningService::Session {
  std::mutex mu;
  std::string id;
  std::string device_id;
  std::optional<std::string> device_model;
  std::optional<inference::SymptomBitmap> symptoms;
  sessions::SelfReport self_report = sessions::SelfReport::kUnanswered;
  std::optional<audio::AudioClip> cough;
  std::optional<screening::GateDecision> cough_gate;
  std::optional<audio::AudioClip> breath;
  std::optional<audio::AudioClip> voice;
};

ScreeningService::ScreeningService(
    std::shared_ptr<const screening::ModelRegistry> registry,
    screening::PipelineOptions options, std::shared_ptr<sessions::SubmissionStore> store,
    std::string admin_token, ServiceLimits limits, Clock clock)
    : registry_(std::move(registry)),
      options_(std::move(options)),
      store_(std::move(store)),
      admin_token_(std::move(admin_token)),
      limits_(limits),
      clock_(std::move(clock)) {
  if (!registry_ || !store_) {
    throw Error(ErrorKind::kConfig, "service needs a model registry and a store");
  }
  options_.weights.Validate();
  RestoreSessions();
}

// Sessions survive a restart without their audio; clients re-upload.
void ScreeningService::RestoreSessions() {
  for (const auto& rec : store_->Sessions()) {
    auto s = std::make_shared<Session>();
    s->id = rec.session_id;
    s->device_id = rec.device_id;
    s->device_model = rec.device_model;
    if (rec.symptoms) {
      inference::SymptomBitmap bits{};
      for (const auto& name : *rec.symptoms) {
        if (auto i = inference::SymptomIndex(name)) bits[*i] = true;
      }
      s->symptoms = bits;
    }
    sessions_[s->id] = std::move(s);
  }
}

std::string ScreeningService::NewSessionId() {
  static std::mt19937_64 rng{std::random_device{}()};
  char buf[40];
  std::snprintf(buf, sizeof buf, "s-%016llx%016llx",
                static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

std::shared_ptr<ScreeningService::Session> ScreeningService::Find(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ApiResponse ScreeningService::CreateSession(std::string_view body) {
  json doc = json::object();
  if (!body.empty()) {
    try {
      doc = json::parse(body);
    } catch (const json::exception& e) {
      return Fail(400, std::string("malformed JSON body: ") + e.what());
    }
  }
  if (!doc.is_object()) return Fail(400, "body must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "device_id" && key != "device_model" && key != "symptoms" &&
        key != "self_reported_status") {
      return Fail(400, "unknown field '" + key + "'");
    }
  }
  auto s = std::make_shared<Session>();
  {
    std::lock_guard<std::mutex> lock(mu_);
    do {
      s->id = NewSessionId();
    } while (sessions_.count(s->id));
  }
  s->device_id = s->id;
  if (doc.contains("device_id")) {
    if (!doc["device_id"].is_string() || doc["device_id"].get<std::string>().empty()) {
      return Fail(400, "device_id must be a non-empty string");
    }
    s->device_id = doc["device_id"].get<std::string>();
  }
  if (doc.contains("device_model") && !doc["device_model"].is_null()) {
    if (!doc["device_model"].is_string()) return Fail(400, "device_model must be a string");
    s->device_model = doc["device_model"].get<std::string>();
  }
  if (doc.contains("self_reported_status")) {
    const json& v = doc["self_reported_status"];
    const auto status =
        v.is_string() ? sessions::ParseSelfReport(v.get<std::string>()) : std::nullopt;
    if (!status) return Fail(400, "self_reported_status must be yes, no or unanswered");
    s->self_report = *status;
  }
  std::optional<std::vector<std::string>> stored_symptoms;
  if (doc.contains("symptoms") && !doc["symptoms"].is_null()) {
    const json& list = doc["symptoms"];
    if (!list.is_array()) return Fail(400, "symptoms must be an array of names");
    inference::SymptomBitmap bits{};
    for (const auto& item : list) {
      const auto idx =
          item.is_string() ? inference::SymptomIndex(item.get<std::string>()) : std::nullopt;
      if (!idx) {
        ApiResponse r = Fail(400, "unknown symptom " + item.dump());
        r.body["allowed"] = AllowedSymptoms();
        return r;
      }
      bits[*idx] = true;
    }
    if (!list.empty()) {
      s->symptoms = bits;
      std::vector<std::string> names;
      for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) names.emplace_back(inference::kSymptomNames[i]);
      }
      stored_symptoms = std::move(names);
    }
  }

  sessions::SessionRecord rec;
  rec.session_id = s->id;
  rec.device_id = s->device_id;
  rec.timestamp = clock_();
  rec.symptoms = stored_symptoms;
  rec.device_model = s->device_model;
  try {
    store_->Append(rec);
  } catch (const Error& e) {
    return Fail(503, e.what());
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    sessions_[s->id] = s;
  }
  return {201, json{{"session_id", s->id}}};
}

ApiResponse ScreeningService::UploadRecording(const std::string& session_id,
                                              std::string_view kind_name,
                                              std::string_view audio_bytes) {
  const auto kind = sessions::ParseRecordingKind(kind_name);
  if (!kind) return Fail(400, "kind must be cough, breath or voice");
  auto session = Find(session_id);
  if (!session) return Fail(404, "unknown session");
  if (audio_bytes.size() > limits_.max_upload_bytes) {
    return Fail(413, "audio exceeds " + std::to_string(limits_.max_upload_bytes) + " bytes");
  }
  audio::AudioClip clip;
  try {
    clip = audio::LoadClip(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(audio_bytes.data()), audio_bytes.size()));
  } catch (const Error& e) {
    return Fail(422, std::string("audio could not be decoded: ") + e.what());
  }
  if (clip.duration_seconds() > limits_.max_upload_seconds) {
    return Fail(413, "audio longer than the upload limit");
  }

  std::lock_guard<std::mutex> lock(session->mu);
  sessions::SubmissionRecord rec;
  rec.session_id = session->id;
  rec.device_id = session->device_id;
  rec.timestamp = clock_();
  rec.recording_kind = *kind;
  rec.self_reported_status = session->self_report;
  rec.device_model = session->device_model;

  json body = {{"kind", std::string(kind_name)}};
  if (*kind == sessions::RecordingKind::kCough) {
    screening::GateDecision gate;
    try {
      gate = screening::GateRecording(clip, registry_->detector, options_.gate_threshold);
    } catch (const Error& e) {
      return Fail(StatusForError(e), e.what());
    }
    rec.gate = sessions::StoredGate{gate.score, gate.threshold, gate.accepted, gate.reason};
    // The latest cough upload decides whether the session may be screened.
    session->cough_gate = gate;
    if (gate.accepted) {
      session->cough = std::move(clip);
    } else {
      session->cough.reset();
    }
    body["gate"] = GateJson(gate);
    body["retry_prompt"] = !gate.accepted;
    if (!gate.accepted) body["instructions"] = std::string(kRecordingInstructions);
  } else if (*kind == sessions::RecordingKind::kBreath) {
    session->breath = std::move(clip);
  } else {
    session->voice = std::move(clip);
  }
  try {
    body["receipt"] = store_->Append(rec).token;
  } catch (const Error& e) {
    return Fail(503, e.what());
  }
  return {200, body};
}

ApiResponse ScreeningService::Predict(const std::string& session_id) {
  auto session = Find(session_id);
  if (!session) return Fail(404, "unknown session");
  std::lock_guard<std::mutex> lock(session->mu);
  if (!session->cough || !session->cough_gate || !session->cough_gate->accepted) {
    return Fail(409, "gate not passed: upload a cough recording that passes the check");
  }
  screening::SessionInputs inputs;
  inputs.cough = *session->cough;
  inputs.breath = session->breath;
  inputs.voice = session->voice;
  inputs.symptoms = session->symptoms;

  screening::PipelineResult result;
  try {
    result = screening::EvaluateAccepted(inputs, *registry_, options_, *session->cough_gate);
  } catch (const Error& e) {
    return Fail(StatusForError(e), e.what());
  }
  const screening::Verdict& v = *result.verdict;

  json branches = {{"dcnn", OptionalNumber(result.branches.dcnn)},
                   {"gb", OptionalNumber(result.branches.gb)},
                   {"gb_breath", OptionalNumber(result.branches.gb_breath)},
                   {"gb_voice", OptionalNumber(result.branches.gb_voice)}};
  json contributing = json::array();
  for (const auto& [name, value] : branches.items()) {
    if (!value.is_null()) contributing.push_back(name);
  }
  if (result.symptom_probability && options_.symptom_weight > 0) {
    contributing.push_back("symptoms");
  }

  sessions::SubmissionRecord rec;
  rec.session_id = session->id;
  rec.device_id = session->device_id;
  rec.timestamp = clock_();
  rec.recording_kind = sessions::RecordingKind::kCough;
  rec.verdict = sessions::StoredVerdict{v.probability, v.band};
  rec.self_reported_status = session->self_report;
  rec.device_model = session->device_model;
  try {
    store_->Append(rec);
  } catch (const Error& e) {
    return Fail(503, e.what());
  }

  return {200, json{{"session_id", session->id},
                    {"probability", v.probability},
                    {"band", std::string(screening::BandName(v.band))},
                    {"retry_allowed", v.band == screening::Band::kUncertain},
                    {"disclaimer", v.disclaimer},
                    {"branches", branches},
                    {"contributing", contributing},
                    {"audio_probability", OptionalNumber(result.audio_probability)},
                    {"symptom_probability", OptionalNumber(result.symptom_probability)}}};
}

ApiResponse ScreeningService::Analytics(std::string_view token,
                                        const std::map<std::string, std::string>& query) {
  if (admin_token_.empty()) return Fail(403, "analytics is disabled (no admin token set)");
  if (token != admin_token_) return Fail(401, "admin token required");

  sessions::TimestampMs from = std::numeric_limits<sessions::TimestampMs>::min();
  sessions::TimestampMs to = std::numeric_limits<sessions::TimestampMs>::max();
  std::size_t bins = 10;
  for (const auto& [key, value] : query) {
    if (key != "from" && key != "to" && key != "bins") {
      return Fail(400, "unknown query parameter '" + key + "'");
    }
  }
  try {
    if (auto it = query.find("from"); it != query.end()) from = sessions::ParseTimestamp(it->second);
    if (auto it = query.find("to"); it != query.end()) to = sessions::ParseTimestamp(it->second);
  } catch (const Error& e) {
    return Fail(400, std::string("malformed window: ") + e.what());
  }
  if (from > to) return Fail(400, "malformed window: from is after to");
  if (auto it = query.find("bins"); it != query.end()) {
    try {
      std::size_t used = 0;
      const long b = std::stol(it->second, &used);
      if (used != it->second.size() || b < 1 || b > 1000) throw std::out_of_range("bins");
      bins = static_cast<std::size_t>(b);
    } catch (const std::exception&) {
      return Fail(400, "bins must be an integer in [1, 1000]");
    }
  }

  const auto log = sessions::FilterWindow(store_->Submissions(), from, to);
  const auto rr = sessions::RerecordingAnalysis(log);
  std::vector<double> gate_scores;
  std::vector<double> verdicts;
  for (const auto& r : log) {
    if (r.gate) gate_scores.push_back(r.gate->score);
    if (r.verdict) verdicts.push_back(r.verdict->probability);
  }
  json rate = nullptr;
  if (rr.gated_count > 0) rate = sessions::RejectionRate(log);

  return {200, json{{"gated_count", rr.gated_count},
                    {"rejected_count", rr.rejected_count},
                    {"rejection_rate", rate},
                    {"rerecording",
                     {{"sequences", rr.sequences.size()},
                      {"successful", rr.successful_count},
                      {"rerecorded_count", rr.rerecorded_count},
                      {"rerecorded_fraction", rr.rerecorded_fraction},
                      {"success_fraction", rr.success_fraction}}},
                    {"gate_score_histogram",
                     HistogramJson(evaluation::MakeProbabilityHistogram(gate_scores, bins))},
                    {"verdict_histogram",
                     HistogramJson(evaluation::MakeProbabilityHistogram(verdicts, bins))}}};
}

void ScreeningService::Mount(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.set_payload_max_length(limits_.max_upload_bytes + 64 * 1024);

  server.Post("/v1/sessions", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, CreateSession(req.body));
  });
  server.Post(R"(/v1/sessions/([^/]+)/recordings)",
              [this, reply](const httplib::Request& req, httplib::Response& res) {
                const std::string kind = req.get_param_value("kind");
                if (req.is_multipart_form_data()) {
                  if (req.has_file("audio")) {
                    reply(res, UploadRecording(req.matches[1], kind,
                                               req.get_file_value("audio").content));
                  } else if (!req.files.empty()) {
                    reply(res, UploadRecording(req.matches[1], kind,
                                               req.files.begin()->second.content));
                  } else {
                    reply(res, Fail(400, "multipart upload without a file"));
                  }
                  return;
                }
                reply(res, UploadRecording(req.matches[1], kind, req.body));
              });
  server.Post(R"(/v1/sessions/([^/]+)/predict)",
              [this, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, Predict(req.matches[1]));
              });
  server.Get("/v1/analytics", [this, reply](const httplib::Request& req, httplib::Response& res) {
    std::string token = req.get_header_value("X-Admin-Token");
    const std::string auth = req.get_header_value("Authorization");
    if (auth.rfind("Bearer ", 0) == 0) token = auth.substr(7);
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query[k] = v;
    reply(res, Analytics(token, query));
  });
  server.set_exception_handler(
      [reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          reply(res, Fail(500, e.what()));
        }
      });
  server.set_error_handler([reply](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      reply(res, Fail(res.status, res.status == 413 ? "upload too large" : "request failed"));
    }
  });
}

namespace {
httplib::Server* g_server = nullptr;
void StopOnSignal(int) {
  if (g_server != nullptr) g_server->stop();
}
}  // namespace

int Serve(const ServiceConfig& config) {
  auto registry = BuildRegistry(config);
  auto store = std::make_shared<sessions::SubmissionStore>(config.storage_path);
  ScreeningService service(registry, PipelineOptionsFrom(config), store, config.admin_token,
                           {config.max_upload_bytes, config.max_upload_seconds});
  httplib::Server server;
  service.Mount(server);
  g_server = &server;
  std::signal(SIGINT, StopOnSignal);
  std::signal(SIGTERM, StopOnSignal);
  spdlog::info("listening on {}:{}", config.host, config.port);
  const bool ok = server.listen(config.host, config.port);
  g_server = nullptr;
  if (!ok) {
    spdlog::error("cannot listen on {}:{}", config.host, config.port);
    return 1;
  }
  return 0;
}

}  // namespace coughscreen::app
