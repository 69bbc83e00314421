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

// Gate rejection and re-recording analytics over the submission log.

#ifndef COUGHSCREEN_SESSIONS_ANALYTICS_H_
#define COUGHSCREEN_SESSIONS_ANALYTICS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "coughscreen/sessions/store.h"

namespace coughscreen::sessions {

inline constexpr TimestampMs kRerecordWindowMs = 20 * 60 * 1000;

struct RerecordingSequence {
  std::string device_id;
  // Indices into the analysed log, in chronological order.
  std::vector<std::size_t> records;
  bool successful = false;
};

struct RerecordingReport {
  std::vector<RerecordingSequence> sequences;
  std::size_t gated_count = 0;
  std::size_t rejected_count = 0;
  // Rejections followed by another recording of the same device within the
  // window, measured from the rejection itself.
  std::size_t rerecorded_count = 0;
  double rerecorded_fraction = 0.0;
  std::size_t successful_count = 0;
  double success_fraction = 0.0;
};

// Only records carrying a gate decision take part. Per device, records are
// ordered by time; a rejection followed within the window by another
// recording opens a sequence, which grows while each gap stays within the
// window and the last recording was rejected. It ends successful on an
// acceptance, unsuccessful otherwise. Empty logs give zero counts.
RerecordingReport RerecordingAnalysis(const std::vector<SubmissionRecord>& log,
                                      TimestampMs window_ms = kRerecordWindowMs);

// rejected / gated. Error{kUndefined} when nothing was gated.
double RejectionRate(const std::vector<SubmissionRecord>& log);

// Keeps records with from <= timestamp < to.
std::vector<SubmissionRecord> FilterWindow(const std::vector<SubmissionRecord>& log,
                                           TimestampMs from, TimestampMs to);

}  // namespace coughscreen::sessions

#endif  // COUGHSCREEN_SESSIONS_ANALYTICS_H_
