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

#include "coughscreen/sessions/store.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <random>
#include <set>

#include "coughscreen/error.h"
#include "json.hpp"

namespace coughscreen::sessions {
namespace {

using json = nlohmann::json;

[[noreturn]] void SchemaError(const std::string& what) {
  throw Error(ErrorKind::kSchema, "log record: " + what);
}

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) SchemaError(where + ": unknown field '" + key + "'");
  }
  for (const auto& key : allowed) {
    if (!obj.contains(key)) SchemaError(where + ": missing field '" + key + "'");
  }
}

const json& Field(const json& obj, const char* key, json::value_t type,
                  const std::string& where) {
  const json& v = obj.at(key);
  const bool ok = type == json::value_t::number_float ? v.is_number() : v.type() == type;
  if (!ok) SchemaError(where + ": field '" + key + "' has the wrong type");
  return v;
}

std::string StringField(const json& obj, const char* key, const std::string& where) {
  return Field(obj, key, json::value_t::string, where).get<std::string>();
}

std::optional<std::string> OptionalString(const json& obj, const char* key,
                                          const std::string& where) {
  if (obj.at(key).is_null()) return std::nullopt;
  return StringField(obj, key, where);
}

json OptionalJson(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

std::optional<screening::Band> ParseBand(std::string_view name) {
  for (auto b : {screening::Band::kNegative, screening::Band::kUncertain,
                 screening::Band::kPositive}) {
    if (screening::BandName(b) == name) return b;
  }
  return std::nullopt;
}

void CheckVersion(const json& doc) {
  const json& v = doc.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    SchemaError("unsupported schema_version");
  }
}

SessionRecord SessionFromJson(const json& doc) {
  const std::string where = "session";
  CheckKeys(doc, {"schema_version", "type", "receipt", "session_id", "device_id",
                  "timestamp", "symptoms", "device_model"},
            where);
  CheckVersion(doc);
  SessionRecord r;
  r.receipt = StringField(doc, "receipt", where);
  r.session_id = StringField(doc, "session_id", where);
  r.device_id = StringField(doc, "device_id", where);
  r.timestamp = ParseTimestamp(StringField(doc, "timestamp", where));
  if (!doc.at("symptoms").is_null()) {
    const json& s = Field(doc, "symptoms", json::value_t::array, where);
    std::vector<std::string> names;
    for (const auto& n : s) {
      if (!n.is_string()) SchemaError(where + ": symptoms must be strings");
      names.push_back(n.get<std::string>());
    }
    r.symptoms = std::move(names);
  }
  r.device_model = OptionalString(doc, "device_model", where);
  return r;
}

SubmissionRecord SubmissionFromJson(const json& doc) {
  const std::string where = "submission";
  CheckKeys(doc, {"schema_version", "type", "receipt", "session_id", "device_id",
                  "timestamp", "recording_kind", "gate", "verdict",
                  "self_reported_status", "device_model"},
            where);
  CheckVersion(doc);
  SubmissionRecord r;
  r.receipt = StringField(doc, "receipt", where);
  r.session_id = StringField(doc, "session_id", where);
  r.device_id = StringField(doc, "device_id", where);
  r.timestamp = ParseTimestamp(StringField(doc, "timestamp", where));
  const auto kind = ParseRecordingKind(StringField(doc, "recording_kind", where));
  if (!kind) SchemaError(where + ": unknown recording_kind");
  r.recording_kind = *kind;

  if (!doc.at("gate").is_null()) {
    const json& g = Field(doc, "gate", json::value_t::object, where);
    CheckKeys(g, {"score", "threshold", "accepted", "reason"}, "gate");
    StoredGate gate;
    gate.score = Field(g, "score", json::value_t::number_float, "gate").get<double>();
    gate.threshold =
        Field(g, "threshold", json::value_t::number_float, "gate").get<double>();
    gate.accepted = Field(g, "accepted", json::value_t::boolean, "gate").get<bool>();
    gate.reason = StringField(g, "reason", "gate");
    r.gate = gate;
  }
  if (!doc.at("verdict").is_null()) {
    const json& v = Field(doc, "verdict", json::value_t::object, where);
    CheckKeys(v, {"probability", "band"}, "verdict");
    StoredVerdict verdict;
    verdict.probability =
        Field(v, "probability", json::value_t::number_float, "verdict").get<double>();
    const auto band = ParseBand(StringField(v, "band", "verdict"));
    if (!band) SchemaError("verdict: unknown band");
    verdict.band = *band;
    r.verdict = verdict;
  }
  const auto status = ParseSelfReport(StringField(doc, "self_reported_status", where));
  if (!status) SchemaError(where + ": unknown self_reported_status");
  r.self_reported_status = *status;
  r.device_model = OptionalString(doc, "device_model", where);
  return r;
}

}  // namespace

std::string FormatTimestamp(TimestampMs t) {
  const std::int64_t ms = ((t % 1000) + 1000) % 1000;
  const std::time_t secs = static_cast<std::time_t>((t - ms) / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
                tm.tm_sec, static_cast<int>(ms));
  return buf;
}

TimestampMs ParseTimestamp(std::string_view text) {
  std::tm tm{};
  int ms = 0;
  char tail[8] = {0};
  const std::string s(text);
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon,
                  &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6 ||
      consumed != 19) {
    throw Error(ErrorKind::kSchema, "bad timestamp '" + s + "'");
  }
  std::string_view rest = std::string_view(s).substr(19);
  if (rest.size() == 5 && rest[0] == '.') {
    if (std::sscanf(s.c_str() + 20, "%3d%7s", &ms, tail) != 2 || std::string(tail) != "Z") {
      throw Error(ErrorKind::kSchema, "bad timestamp '" + s + "'");
    }
  } else if (rest != "Z") {
    throw Error(ErrorKind::kSchema, "bad timestamp '" + s + "' (expected UTC 'Z')");
  }
  if (tm.tm_mon < 1 || tm.tm_mon > 12 || tm.tm_mday < 1 || tm.tm_mday > 31 ||
      tm.tm_hour > 23 || tm.tm_min > 59 || tm.tm_sec > 60) {
    throw Error(ErrorKind::kSchema, "timestamp out of range '" + s + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return static_cast<TimestampMs>(timegm(&tm)) * 1000 + ms;
}

std::string_view RecordingKindName(RecordingKind kind) {
  switch (kind) {
    case RecordingKind::kCough: return "cough";
    case RecordingKind::kBreath: return "breath";
    case RecordingKind::kVoice: return "voice";
  }
  return "unknown";
}

std::optional<RecordingKind> ParseRecordingKind(std::string_view name) {
  for (auto k : {RecordingKind::kCough, RecordingKind::kBreath, RecordingKind::kVoice}) {
    if (RecordingKindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view SelfReportName(SelfReport s) {
  switch (s) {
    case SelfReport::kYes: return "yes";
    case SelfReport::kNo: return "no";
    case SelfReport::kUnanswered: return "unanswered";
  }
  return "unknown";
}

std::optional<SelfReport> ParseSelfReport(std::string_view name) {
  for (auto s : {SelfReport::kYes, SelfReport::kNo, SelfReport::kUnanswered}) {
    if (SelfReportName(s) == name) return s;
  }
  return std::nullopt;
}

std::string SubmissionToJson(const SubmissionRecord& r) {
  json gate = nullptr;
  if (r.gate) {
    gate = {{"score", r.gate->score},
            {"threshold", r.gate->threshold},
            {"accepted", r.gate->accepted},
            {"reason", r.gate->reason}};
  }
  json verdict = nullptr;
  if (r.verdict) {
    verdict = {{"probability", r.verdict->probability},
               {"band", screening::BandName(r.verdict->band)}};
  }
  json doc = {{"schema_version", kSchemaVersion},
              {"type", "submission"},
              {"receipt", r.receipt},
              {"session_id", r.session_id},
              {"device_id", r.device_id},
              {"timestamp", FormatTimestamp(r.timestamp)},
              {"recording_kind", RecordingKindName(r.recording_kind)},
              {"gate", gate},
              {"verdict", verdict},
              {"self_reported_status", SelfReportName(r.self_reported_status)},
              {"device_model", OptionalJson(r.device_model)}};
  return doc.dump();
}

std::string SessionToJson(const SessionRecord& r) {
  json doc = {{"schema_version", kSchemaVersion},
              {"type", "session"},
              {"receipt", r.receipt},
              {"session_id", r.session_id},
              {"device_id", r.device_id},
              {"timestamp", FormatTimestamp(r.timestamp)},
              {"symptoms", r.symptoms ? json(*r.symptoms) : json(nullptr)},
              {"device_model", OptionalJson(r.device_model)}};
  return doc.dump();
}

LogEvent ParseLogLine(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("log record: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string() ||
      !doc.contains("schema_version")) {
    SchemaError("expected an object with schema_version and type");
  }
  LogEvent ev;
  const std::string type = doc["type"].get<std::string>();
  if (type == "session") {
    ev.session = SessionFromJson(doc);
  } else if (type == "submission") {
    ev.submission = SubmissionFromJson(doc);
  } else {
    SchemaError("unknown event type '" + type + "'");
  }
  return ev;
}

SubmissionStore::SubmissionStore(std::string path, bool sync)
    : path_(std::move(path)), sync_(sync) {
  if (path_.empty()) return;
  Replay();
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorKind::kStorage,
                "store: cannot open " + path_ + ": " + std::strerror(errno));
  }
}

SubmissionStore::~SubmissionStore() {
  if (fd_ >= 0) ::close(fd_);
}

void SubmissionStore::Replay() {
  std::ifstream in(path_);
  if (!in) return;  // a fresh store
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LogEvent ev;
    try {
      ev = ParseLogLine(line);
    } catch (const Error& e) {
      throw Error(e.kind(), path_ + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const std::string& token = ev.session ? ev.session->receipt : ev.submission->receipt;
    if (tokens_.count(token)) continue;
    tokens_.emplace(token, next_sequence_++);
    if (ev.session) sessions_.push_back(std::move(*ev.session));
    else submissions_.push_back(std::move(*ev.submission));
  }
}

std::string SubmissionStore::NewToken() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[48];
  std::snprintf(buf, sizeof buf, "r-%016llx-%llu",
                static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(token_counter_++));
  return buf;
}

Receipt SubmissionStore::Commit(const std::string& token, const std::string& line) {
  if (fd_ >= 0) {
    const std::string out = line + "\n";
    const ssize_t n = ::write(fd_, out.data(), out.size());
    if (n != static_cast<ssize_t>(out.size())) {
      throw Error(ErrorKind::kStorage, "store: append to " + path_ + " failed: " +
                                           (n < 0 ? std::strerror(errno) : "short write"));
    }
    if (sync_ && ::fsync(fd_) != 0) {
      throw Error(ErrorKind::kStorage, "store: fsync failed: " + std::string(std::strerror(errno)));
    }
  }
  const std::uint64_t seq = next_sequence_++;
  tokens_.emplace(token, seq);
  return {token, seq, false};
}

Receipt SubmissionStore::Append(SubmissionRecord record) {
  std::lock_guard<std::mutex> lock(mu_);
  if (record.receipt.empty()) record.receipt = NewToken();
  if (auto it = tokens_.find(record.receipt); it != tokens_.end()) {
    return {record.receipt, it->second, true};
  }
  // Round-trip through the parser so nothing unreadable is ever written.
  const std::string line = SubmissionToJson(record);
  ParseLogLine(line);
  Receipt r = Commit(record.receipt, line);
  submissions_.push_back(std::move(record));
  return r;
}

Receipt SubmissionStore::Append(SessionRecord record) {
  std::lock_guard<std::mutex> lock(mu_);
  if (record.receipt.empty()) record.receipt = NewToken();
  if (auto it = tokens_.find(record.receipt); it != tokens_.end()) {
    return {record.receipt, it->second, true};
  }
  const std::string line = SessionToJson(record);
  ParseLogLine(line);
  Receipt r = Commit(record.receipt, line);
  sessions_.push_back(std::move(record));
  return r;
}

std::vector<SubmissionRecord> SubmissionStore::Submissions() const {
  std::lock_guard<std::mutex> lock(mu_);
  return submissions_;
}

std::vector<SessionRecord> SubmissionStore::Sessions() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_;
}

std::size_t SubmissionStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return submissions_.size() + sessions_.size();
}

std::vector<SubmissionRecord> ReadSubmissionLog(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw Error(ErrorKind::kStorage, "cannot open log " + path);
  probe.close();
  std::vector<SubmissionRecord> out;
  std::set<std::string> seen;
  std::ifstream in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LogEvent ev;
    try {
      ev = ParseLogLine(line);
    } catch (const Error& e) {
      throw Error(e.kind(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (ev.submission && seen.insert(ev.submission->receipt).second) {
      out.push_back(std::move(*ev.submission));
    }
  }
  return out;
}

}  // namespace coughscreen::sessions
