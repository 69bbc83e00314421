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

// Group-balanced sampling stream over a manifest.

#ifndef COUGHSCREEN_SESSIONS_SAMPLER_H_
#define COUGHSCREEN_SESSIONS_SAMPLER_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "coughscreen/sessions/manifest.h"

namespace coughscreen::sessions {

struct SamplerOptions {
  // Throw Error{kConfig} on a single-class group instead of excluding it
  // with a warning.
  bool strict = false;
};

// Draws a group with probability proportional to its size, then a class
// with probability 1/2, then an entry of that class uniformly. Within every
// group the expected positive and negative draw rates are therefore equal.
// The stream depends only on the entries and the seed.
class BalancedSampler {
 public:
  BalancedSampler(std::vector<ManifestEntry> entries, std::uint64_t seed,
                  SamplerOptions options = {});

  const ManifestEntry& Next();
  std::size_t NextIndex();  // index into entries()

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  const std::vector<std::string>& excluded_groups() const { return excluded_; }
  std::size_t group_count() const { return groups_.size(); }

 private:
  struct Group {
    std::string key;
    std::vector<std::size_t> negatives;
    std::vector<std::size_t> positives;
  };

  std::uint64_t Below(std::uint64_t bound);

  std::vector<ManifestEntry> entries_;
  std::vector<Group> groups_;
  std::vector<std::uint64_t> cumulative_;  // running group sizes
  std::vector<std::string> excluded_;
  std::mt19937_64 rng_;
};

}  // namespace coughscreen::sessions

#endif  // COUGHSCREEN_SESSIONS_SAMPLER_H_
