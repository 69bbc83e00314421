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

#include "coughscreen/evaluation/distribution.h"

#include <algorithm>
#include <numeric>

#include "coughscreen/error.h"

namespace coughscreen::evaluation {

double ProbabilityQuantile(std::span<const double> scores, double value) {
  if (scores.empty()) throw Error(ErrorKind::kInvalidArgument, "quantile of no scores");
  std::size_t below = 0;
  std::size_t equal = 0;
  for (double s : scores) {
    below += s < value;
    equal += s == value;
  }
  return (static_cast<double>(below) + 0.5 * static_cast<double>(equal)) /
         static_cast<double>(scores.size());
}

std::uint64_t ProbabilityHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ProbabilityHistogram MakeProbabilityHistogram(std::span<const double> scores,
                                              std::size_t bin_count) {
  if (bin_count == 0) throw Error(ErrorKind::kInvalidArgument, "histogram needs bins");
  ProbabilityHistogram h;
  h.counts.assign(bin_count, 0);
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "histogram score outside [0,1]");
    }
    const auto b = static_cast<std::size_t>(s * static_cast<double>(bin_count));
    ++h.counts[std::min(b, bin_count - 1)];
  }
  return h;
}

}  // namespace coughscreen::evaluation
