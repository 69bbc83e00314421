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

// Output-probability distribution analytics.

#ifndef COUGHSCREEN_EVALUATION_DISTRIBUTION_H_
#define COUGHSCREEN_EVALUATION_DISTRIBUTION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace coughscreen::evaluation {

// Fraction of scores strictly below `value` plus half the fraction equal to
// it. Error{kInvalidArgument} for an empty list.
double ProbabilityQuantile(std::span<const double> scores, double value);

struct ProbabilityHistogram {
  // counts[b] covers [b/n, (b+1)/n); the last bin also holds 1.0.
  std::vector<std::uint64_t> counts;
  std::vector<double> markers{0.45, 0.55};

  double bin_width() const { return 1.0 / static_cast<double>(counts.size()); }
  std::uint64_t total() const;
};

// Equal-width bins over [0,1]. Error{kInvalidArgument} for a zero bin count
// or a score outside [0,1].
ProbabilityHistogram MakeProbabilityHistogram(std::span<const double> scores,
                                              std::size_t bin_count);

}  // namespace coughscreen::evaluation

#endif  // COUGHSCREEN_EVALUATION_DISTRIBUTION_H_
