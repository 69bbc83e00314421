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

#include "coughscreen/evaluation/kfold.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "coughscreen/error.h"

namespace coughscreen::evaluation {

std::vector<std::size_t> FoldPlan::FoldMembers(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<Role> FoldPlan::Roles(std::size_t fold) const {
  if (fold >= k) throw Error(ErrorKind::kInvalidArgument, "fold index out of range");
  const std::size_t n = stratified_order.size();
  const std::size_t n_test = static_cast<std::size_t>(std::llround(0.15 * n));
  const std::size_t n_val = static_cast<std::size_t>(std::llround(0.15 * n));
  const std::size_t rest = n - n_test;
  const std::size_t shift = fold * n / k;

  std::vector<Role> roles(n, Role::kTrain);
  std::size_t non_test = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t item = stratified_order[(p + shift) % n];
    // Bresenham spreading: position p is a test slot when the running
    // quota floor((p+1)*n_test/n) ticks over.
    if ((p + 1) * n_test / n != p * n_test / n) {
      roles[item] = Role::kTest;
      continue;
    }
    if (rest > 0 && (non_test + 1) * n_val / rest != non_test * n_val / rest) {
      roles[item] = Role::kValidation;
    }
    ++non_test;
  }
  return roles;
}

FoldPlan KFoldPlan(const std::vector<FoldItem>& items, std::size_t k,
                   std::uint64_t seed) {
  if (k == 0 || k > items.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "k-fold: k=" + std::to_string(k) + " with " +
                    std::to_string(items.size()) + " items");
  }
  std::map<std::pair<int, std::string>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < items.size(); ++i) {
    strata[{items[i].label, items[i].group}].push_back(i);
  }
  std::mt19937_64 rng(seed);
  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(items.size(), 0);
  std::size_t counter = 0;
  for (auto& [key, members] : strata) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t idx : members) {
      plan.assignments[idx] = counter % k;
      plan.stratified_order.push_back(idx);
      ++counter;
    }
  }
  return plan;
}

}  // namespace coughscreen::evaluation
