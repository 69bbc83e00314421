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

#include "coughscreen/sessions/analytics.h"

#include <algorithm>
#include <map>

#include "coughscreen/error.h"

namespace coughscreen::sessions {

RerecordingReport RerecordingAnalysis(const std::vector<SubmissionRecord>& log,
                                      TimestampMs window_ms) {
  RerecordingReport report;
  std::map<std::string, std::vector<std::size_t>> by_device;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (!log[i].gate) continue;
    ++report.gated_count;
    if (!log[i].gate->accepted) ++report.rejected_count;
    by_device[log[i].device_id].push_back(i);
  }

  for (auto& [device, idx] : by_device) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return log[a].timestamp < log[b].timestamp;
    });
    auto accepted = [&](std::size_t p) { return log[idx[p]].gate->accepted; };
    auto follows = [&](std::size_t p) {
      return p + 1 < idx.size() &&
             log[idx[p + 1]].timestamp - log[idx[p]].timestamp <= window_ms;
    };

    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (!accepted(p) && follows(p)) ++report.rerecorded_count;
    }

    std::size_t p = 0;
    while (p < idx.size()) {
      if (accepted(p) || !follows(p)) {
        ++p;
        continue;
      }
      RerecordingSequence seq;
      seq.device_id = device;
      seq.records.push_back(idx[p]);
      while (!accepted(p) && follows(p)) {
        ++p;
        seq.records.push_back(idx[p]);
      }
      seq.successful = accepted(p);
      report.successful_count += seq.successful;
      report.sequences.push_back(std::move(seq));
      ++p;
    }
  }

  if (report.rejected_count > 0) {
    report.rerecorded_fraction = static_cast<double>(report.rerecorded_count) /
                                 static_cast<double>(report.rejected_count);
  }
  if (!report.sequences.empty()) {
    report.success_fraction = static_cast<double>(report.successful_count) /
                              static_cast<double>(report.sequences.size());
  }
  return report;
}

double RejectionRate(const std::vector<SubmissionRecord>& log) {
  std::size_t gated = 0;
  std::size_t rejected = 0;
  for (const auto& r : log) {
    if (!r.gate) continue;
    ++gated;
    rejected += !r.gate->accepted;
  }
  if (gated == 0) {
    throw Error(ErrorKind::kUndefined, "rejection rate of a log with no gated recordings");
  }
  return static_cast<double>(rejected) / static_cast<double>(gated);
}

std::vector<SubmissionRecord> FilterWindow(const std::vector<SubmissionRecord>& log,
                                           TimestampMs from, TimestampMs to) {
  std::vector<SubmissionRecord> out;
  for (const auto& r : log) {
    if (r.timestamp >= from && r.timestamp < to) out.push_back(r);
  }
  return out;
}

}  // namespace coughscreen::sessions
