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

// Portable gradient-boosted tree ensemble for binary classification.
//
// Model document (JSON):
//
//   {
//     "feature_count": 1356,
//     "base_score": 0.0,
//     "trees": [
//       {"nodes": [
//         {"feature": 3, "threshold": 0.5, "left": 1, "right": 2},
//         {"leaf": -1.0},
//         {"leaf": 2.0}
//       ]}
//     ]
//   }
//
// nodes[0] is the root. A split node sends an example left iff
// x[feature] < threshold (strictly), otherwise right; there is no missing
// value branch since features are dense. Every node must be reachable from
// the root exactly once (no cycles, no shared children) and every tree must
// have at least one node. Unknown keys are rejected.
//
// The probability is sigmoid(margin) where the margin accumulates base_score
// first and then each tree's leaf in document order.

#ifndef COUGHSCREEN_INFERENCE_TREE_ENSEMBLE_H_
#define COUGHSCREEN_INFERENCE_TREE_ENSEMBLE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace coughscreen::inference {

double Sigmoid(double x);

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double leaf_value = 0.0;

  bool is_leaf() const { return feature == kLeaf; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct TreeEnsembleModel {
  std::vector<Tree> trees;
  double base_score = 0.0;
  std::size_t feature_count = 0;
  friend bool operator==(const TreeEnsembleModel&,
                         const TreeEnsembleModel&) = default;
};

// Throws Error{kSchema} with a JSON-pointer-like path ("trees[2].nodes[5]")
// to the offending element.
TreeEnsembleModel LoadTreeEnsemble(const nlohmann::json& document);
TreeEnsembleModel LoadTreeEnsembleFile(const std::string& path);
nlohmann::json SaveTreeEnsemble(const TreeEnsembleModel& model);

// Checks the structural invariants of an in-memory model; same errors as
// LoadTreeEnsemble.
void ValidateTreeEnsemble(const TreeEnsembleModel& model);

// Raw margin before the sigmoid.
double TreeEnsembleMargin(const TreeEnsembleModel& model,
                          std::span<const double> features);

// Throws Error{kContract} when features.size() != feature_count.
double EvalTreeEnsemble(const TreeEnsembleModel& model,
                        std::span<const double> features);

}  // namespace coughscreen::inference

#endif  // COUGHSCREEN_INFERENCE_TREE_ENSEMBLE_H_
