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

// Stratified k-fold plans with per-fold 70/15/15 train/validation/test roles.

#ifndef COUGHSCREEN_EVALUATION_KFOLD_H_
#define COUGHSCREEN_EVALUATION_KFOLD_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace coughscreen::evaluation {

struct FoldItem {
  std::string id;
  int label = 0;
  std::string group;
};

enum class Role { kTrain, kValidation, kTest };

struct FoldPlan {
  std::size_t k = 0;
  // assignments[i] is the fold of items[i].
  std::vector<std::size_t> assignments;
  // Item indices in stratified dealing order; roles are laid over it.
  std::vector<std::size_t> stratified_order;

  std::vector<std::size_t> FoldMembers(std::size_t fold) const;
  // Train/validation/test role of every item for one fold's run, 70/15/15
  // within one item, spread evenly over the stratified order. Successive
  // folds rotate the order so their test sets differ.
  std::vector<Role> Roles(std::size_t fold) const;
};

// Items are grouped into strata by (label, group), each stratum shuffled
// with the seed and dealt round-robin into folds; the dealing counter runs
// on across strata so per-fold label counts differ by at most one.
// Error{kInvalidArgument} when k is 0 or exceeds the item count.
FoldPlan KFoldPlan(const std::vector<FoldItem>& items, std::size_t k,
                   std::uint64_t seed);

}  // namespace coughscreen::evaluation

#endif  // COUGHSCREEN_EVALUATION_KFOLD_H_
