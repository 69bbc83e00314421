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

#include "coughscreen/sessions/sampler.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>

#include "coughscreen/error.h"

namespace coughscreen::sessions {

BalancedSampler::BalancedSampler(std::vector<ManifestEntry> entries,
                                 std::uint64_t seed, SamplerOptions options)
    : entries_(std::move(entries)), rng_(seed) {
  std::map<std::string, Group> by_key;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    Group& g = by_key[entries_[i].GroupKey()];
    g.key = entries_[i].GroupKey();
    (entries_[i].label == 1 ? g.positives : g.negatives).push_back(i);
  }
  std::uint64_t running = 0;
  for (auto& [key, g] : by_key) {
    if (g.positives.empty() || g.negatives.empty()) {
      if (options.strict) {
        throw Error(ErrorKind::kConfig, "sampler: group '" + key + "' has a single class");
      }
      spdlog::warn("sampler: excluding single-class group '{}'", key);
      excluded_.push_back(key);
      continue;
    }
    running += g.positives.size() + g.negatives.size();
    cumulative_.push_back(running);
    groups_.push_back(std::move(g));
  }
  if (groups_.empty()) {
    throw Error(ErrorKind::kDegenerateInput, "sampler: no group has both classes");
  }
}

// Unbiased draw in [0, bound) by rejection; keeps the stream identical
// across standard library implementations.
std::uint64_t BalancedSampler::Below(std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng_();
  } while (x >= limit);
  return x % bound;
}

std::size_t BalancedSampler::NextIndex() {
  const std::uint64_t r = Below(cumulative_.back());
  const auto g = static_cast<std::size_t>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), r) - cumulative_.begin());
  const Group& group = groups_[g];
  const auto& pool = (rng_() >> 63) ? group.positives : group.negatives;
  return pool[Below(pool.size())];
}

const ManifestEntry& BalancedSampler::Next() { return entries_[NextIndex()]; }

}  // namespace coughscreen::sessions
