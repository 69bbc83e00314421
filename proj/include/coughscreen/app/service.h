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

// HTTP+JSON screening service.
//
//   POST /v1/sessions
//       body {"device_id"?, "device_model"?, "symptoms"?: [names],
//             "self_reported_status"?: "yes|no|unanswered"}
//       201 {"session_id"}; 400 on a malformed body or unknown symptom.
//   POST /v1/sessions/{id}/recordings?kind=cough|breath|voice
//       raw WAV body, or multipart with the file in field "audio".
//       200 cough: {"kind","receipt","gate":{..},"retry_prompt","instructions"?}
//       200 breath/voice: {"kind","receipt"}
//       400 bad kind, 404 unknown session, 413 over the size or duration
//       cap, 422 undecodable audio.
//   POST /v1/sessions/{id}/predict
//       200 {"session_id","probability","band","retry_allowed","disclaimer",
//            "branches":{..},"contributing":[..],"audio_probability",
//            "symptom_probability"}
//       404 unknown session, 409 without an accepted cough.
//   GET /v1/analytics?from=&to=&bins=
//       admin token as "Authorization: Bearer <token>" or "X-Admin-Token".
//       200 {"gated_count","rejected_count","rejection_rate",
//            "rerecording":{..},"gate_score_histogram":{..},
//            "verdict_histogram":{..}}
//       400 malformed window, 401 bad token, 403 when no token is configured.
//
// Errors are {"error": message}.

#ifndef COUGHSCREEN_APP_SERVICE_H_
#define COUGHSCREEN_APP_SERVICE_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "coughscreen/app/config.h"
#include "coughscreen/screening/pipeline.h"
#include "coughscreen/sessions/store.h"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace coughscreen::app {

inline constexpr std::string_view kRecordingInstructions =
    "We could not hear a cough in that recording. Find a quiet place, hold the "
    "phone about an arm's length from your mouth, then tap record and cough "
    "clearly a few times before stopping.";

using Clock = std::function<sessions::TimestampMs()>;
sessions::TimestampMs SystemClockMs();

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

struct ServiceLimits {
  std::size_t max_upload_bytes = 10 * 1024 * 1024;
  double max_upload_seconds = 30.0;
};

class ScreeningService {
 public:
  ScreeningService(std::shared_ptr<const screening::ModelRegistry> registry,
                   screening::PipelineOptions options,
                   std::shared_ptr<sessions::SubmissionStore> store,
                   std::string admin_token, ServiceLimits limits = {},
                   Clock clock = SystemClockMs);

  ApiResponse CreateSession(std::string_view body);
  ApiResponse UploadRecording(const std::string& session_id, std::string_view kind,
                              std::string_view audio_bytes);
  ApiResponse Predict(const std::string& session_id);
  ApiResponse Analytics(std::string_view token,
                        const std::map<std::string, std::string>& query);

  // Registers the routes on an httplib server.
  void Mount(httplib::Server& server);

  const screening::PipelineOptions& options() const { return options_; }

 private:
  struct Session;
  std::shared_ptr<Session> Find(const std::string& id);
  std::string NewSessionId();
  void RestoreSessions();

  std::shared_ptr<const screening::ModelRegistry> registry_;
  screening::PipelineOptions options_;
  std::shared_ptr<sessions::SubmissionStore> store_;
  std::string admin_token_;
  ServiceLimits limits_;
  Clock clock_;

  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// Builds the registry and store from a config, then serves until stopped.
// Returns a process exit code.
int Serve(const ServiceConfig& config);

}  // namespace coughscreen::app

#endif  // COUGHSCREEN_APP_SERVICE_H_
