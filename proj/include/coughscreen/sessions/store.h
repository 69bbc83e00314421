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

// Append-only submission log stored as newline-delimited JSON.
//
// Every line is one event object carrying "schema_version" and "type":
//
//   {"schema_version":1,"type":"session","receipt":..,"session_id":..,
//    "device_id":..,"timestamp":"2026-01-01T00:00:00.000Z",
//    "symptoms":[..] | null,"device_model":.. | null}
//
//   {"schema_version":1,"type":"submission","receipt":..,"session_id":..,
//    "device_id":..,"timestamp":..,"recording_kind":"cough|breath|voice",
//    "gate":{"score":..,"threshold":..,"accepted":..,"reason":..} | null,
//    "verdict":{"probability":..,"band":..} | null,
//    "self_reported_status":"yes|no|unanswered","device_model":.. | null}
//
// Unknown fields are rejected. Device ids are opaque client-side hashes.

#ifndef COUGHSCREEN_SESSIONS_STORE_H_
#define COUGHSCREEN_SESSIONS_STORE_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coughscreen/screening/screening.h"

namespace coughscreen::sessions {

inline constexpr int kSchemaVersion = 1;

// UTC milliseconds since the Unix epoch.
using TimestampMs = std::int64_t;

std::string FormatTimestamp(TimestampMs t);  // 2026-01-01T00:00:00.000Z
// Accepts the format above, with or without milliseconds. Throws
// Error{kSchema} on anything else.
TimestampMs ParseTimestamp(std::string_view text);

enum class RecordingKind { kCough, kBreath, kVoice };
std::string_view RecordingKindName(RecordingKind kind);
std::optional<RecordingKind> ParseRecordingKind(std::string_view name);

enum class SelfReport { kYes, kNo, kUnanswered };
std::string_view SelfReportName(SelfReport s);
std::optional<SelfReport> ParseSelfReport(std::string_view name);

struct StoredVerdict {
  double probability = 0.0;
  screening::Band band = screening::Band::kUncertain;
  friend bool operator==(const StoredVerdict&, const StoredVerdict&) = default;
};

struct StoredGate {
  double score = 0.0;
  double threshold = 0.0;
  bool accepted = false;
  std::string reason;
  friend bool operator==(const StoredGate&, const StoredGate&) = default;
};

struct SubmissionRecord {
  std::string receipt;  // idempotence token; generated when empty
  std::string session_id;
  std::string device_id;
  TimestampMs timestamp = 0;
  RecordingKind recording_kind = RecordingKind::kCough;
  std::optional<StoredGate> gate;
  std::optional<StoredVerdict> verdict;
  SelfReport self_reported_status = SelfReport::kUnanswered;
  std::optional<std::string> device_model;
  friend bool operator==(const SubmissionRecord&, const SubmissionRecord&) = default;
};

struct SessionRecord {
  std::string receipt;
  std::string session_id;
  std::string device_id;
  TimestampMs timestamp = 0;
  std::optional<std::vector<std::string>> symptoms;
  std::optional<std::string> device_model;
  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

std::string SubmissionToJson(const SubmissionRecord& r);
std::string SessionToJson(const SessionRecord& r);

// Parses one log line. Throws Error{kSchema} for malformed JSON, a wrong
// schema version, missing or mistyped fields and unknown fields.
struct LogEvent {
  std::optional<SessionRecord> session;
  std::optional<SubmissionRecord> submission;
};
LogEvent ParseLogLine(std::string_view line);

struct Receipt {
  std::string token;
  std::uint64_t sequence = 0;  // position in the log
  bool duplicate = false;      // token had already been stored
};

// Thread-safe append-only store. With an empty path the store lives in
// memory only. Each append is a single write(2) on an O_APPEND descriptor,
// so concurrent processes cannot interleave partial lines.
class SubmissionStore {
 public:
  explicit SubmissionStore(std::string path = {}, bool sync = false);
  ~SubmissionStore();
  SubmissionStore(const SubmissionStore&) = delete;
  SubmissionStore& operator=(const SubmissionStore&) = delete;

  // Appending a token that is already stored returns the original receipt
  // and writes nothing. Throws Error{kStorage} when the write fails, in
  // which case nothing is recorded and the append may be retried.
  Receipt Append(SubmissionRecord record);
  Receipt Append(SessionRecord record);

  std::vector<SubmissionRecord> Submissions() const;
  std::vector<SessionRecord> Sessions() const;
  std::size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string NewToken();
  Receipt Commit(const std::string& token, const std::string& line);
  void Replay();

  std::string path_;
  bool sync_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t token_counter_ = 0;
  std::unordered_map<std::string, std::uint64_t> tokens_;
  std::vector<SubmissionRecord> submissions_;
  std::vector<SessionRecord> sessions_;
};

// Reads a whole log file; same validation as the store's replay.
std::vector<SubmissionRecord> ReadSubmissionLog(const std::string& path);

}  // namespace coughscreen::sessions

#endif  // COUGHSCREEN_SESSIONS_STORE_H_
