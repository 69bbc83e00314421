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

#include "coughscreen/inference/tree_ensemble.h"

#include <cmath>
#include <fstream>
#include <set>

#include "coughscreen/error.h"

namespace coughscreen::inference {
namespace {

using json = nlohmann::json;

[[noreturn]] void SchemaError(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kSchema, "tree ensemble: " + path + ": " + what);
}

void RejectUnknownKeys(const json& object, const std::set<std::string>& allowed,
                       const std::string& path) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) SchemaError(path, "unknown key '" + key + "'");
  }
}

double RequireNumber(const json& object, const char* key, const std::string& path) {
  if (!object.contains(key) || !object.at(key).is_number()) {
    SchemaError(path, std::string("'") + key + "' must be a number");
  }
  const double v = object.at(key).get<double>();
  if (!std::isfinite(v)) SchemaError(path, std::string("'") + key + "' must be finite");
  return v;
}

std::int64_t RequireIndex(const json& object, const char* key,
                          const std::string& path) {
  if (!object.contains(key) || !object.at(key).is_number_integer()) {
    SchemaError(path, std::string("'") + key + "' must be an integer");
  }
  return object.at(key).get<std::int64_t>();
}

std::string NodePath(std::size_t tree, std::size_t node) {
  return "trees[" + std::to_string(tree) + "].nodes[" + std::to_string(node) + "]";
}

}  // namespace

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void ValidateTreeEnsemble(const TreeEnsembleModel& model) {
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& nodes = model.trees[t].nodes;
    if (nodes.empty()) {
      SchemaError("trees[" + std::to_string(t) + "]", "tree has no nodes");
    }
    // Depth-first walk from the root; a node seen twice means a cycle or a
    // shared child.
    std::vector<bool> seen(nodes.size(), false);
    std::vector<std::int32_t> stack = {0};
    while (!stack.empty()) {
      const std::int32_t id = stack.back();
      stack.pop_back();
      if (seen[id]) {
        SchemaError(NodePath(t, id), "node reached twice (cycle or shared child)");
      }
      seen[id] = true;
      const TreeNode& node = nodes[id];
      if (node.is_leaf()) continue;
      if (node.feature < 0 ||
          static_cast<std::size_t>(node.feature) >= model.feature_count) {
        SchemaError(NodePath(t, id), "feature index " + std::to_string(node.feature) +
                                         " out of range for feature_count " +
                                         std::to_string(model.feature_count));
      }
      for (std::int32_t child : {node.left, node.right}) {
        if (child < 0 || static_cast<std::size_t>(child) >= nodes.size()) {
          SchemaError(NodePath(t, id),
                      "child index " + std::to_string(child) + " out of range");
        }
        stack.push_back(child);
      }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!seen[i]) SchemaError(NodePath(t, i), "node unreachable from root");
    }
  }
}

TreeEnsembleModel LoadTreeEnsemble(const json& document) {
  if (!document.is_object()) SchemaError("$", "document must be an object");
  RejectUnknownKeys(document, {"feature_count", "base_score", "trees"}, "$");

  TreeEnsembleModel model;
  const std::int64_t feature_count = RequireIndex(document, "feature_count", "$");
  if (feature_count <= 0) SchemaError("$", "'feature_count' must be positive");
  model.feature_count = static_cast<std::size_t>(feature_count);
  model.base_score = RequireNumber(document, "base_score", "$");

  if (!document.contains("trees") || !document.at("trees").is_array()) {
    SchemaError("$", "'trees' must be an array");
  }
  const json& trees = document.at("trees");
  model.trees.reserve(trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const std::string tree_path = "trees[" + std::to_string(t) + "]";
    const json& tree_doc = trees[t];
    if (!tree_doc.is_object()) SchemaError(tree_path, "tree must be an object");
    RejectUnknownKeys(tree_doc, {"nodes"}, tree_path);
    if (!tree_doc.contains("nodes") || !tree_doc.at("nodes").is_array()) {
      SchemaError(tree_path, "'nodes' must be an array");
    }
    Tree tree;
    for (std::size_t i = 0; i < tree_doc.at("nodes").size(); ++i) {
      const json& node_doc = tree_doc.at("nodes")[i];
      const std::string path = NodePath(t, i);
      if (!node_doc.is_object()) SchemaError(path, "node must be an object");
      TreeNode node;
      if (node_doc.contains("leaf")) {
        RejectUnknownKeys(node_doc, {"leaf"}, path);
        node.leaf_value = RequireNumber(node_doc, "leaf", path);
      } else {
        RejectUnknownKeys(node_doc, {"feature", "threshold", "left", "right"}, path);
        const std::int64_t feature = RequireIndex(node_doc, "feature", path);
        if (feature < 0 || feature > INT32_MAX) {
          SchemaError(path, "feature index " + std::to_string(feature) + " out of range");
        }
        node.feature = static_cast<std::int32_t>(feature);
        node.threshold = RequireNumber(node_doc, "threshold", path);
        const std::int64_t left = RequireIndex(node_doc, "left", path);
        const std::int64_t right = RequireIndex(node_doc, "right", path);
        if (left < 0 || left > INT32_MAX || right < 0 || right > INT32_MAX) {
          SchemaError(path, "child index out of range");
        }
        node.left = static_cast<std::int32_t>(left);
        node.right = static_cast<std::int32_t>(right);
      }
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  ValidateTreeEnsemble(model);
  return model;
}

TreeEnsembleModel LoadTreeEnsembleFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kLoad, "tree ensemble: cannot open " + path);
  json document;
  try {
    document = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, "tree ensemble: " + path + ": " + e.what());
  }
  return LoadTreeEnsemble(document);
}

json SaveTreeEnsemble(const TreeEnsembleModel& model) {
  json trees = json::array();
  for (const Tree& tree : model.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) {
        nodes.push_back({{"leaf", node.leaf_value}});
      } else {
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"feature_count", model.feature_count},
          {"base_score", model.base_score},
          {"trees", std::move(trees)}};
}

double TreeEnsembleMargin(const TreeEnsembleModel& model,
                          std::span<const double> features) {
  if (features.size() != model.feature_count) {
    throw Error(ErrorKind::kContract,
                "tree ensemble: expected " + std::to_string(model.feature_count) +
                    " features, got " + std::to_string(features.size()));
  }
  double margin = model.base_score;
  for (const Tree& tree : model.trees) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
      node = &tree.nodes[features[node->feature] < node->threshold ? node->left
                                                                    : node->right];
    }
    margin += node->leaf_value;
  }
  return margin;
}

double EvalTreeEnsemble(const TreeEnsembleModel& model,
                        std::span<const double> features) {
  return Sigmoid(TreeEnsembleMargin(model, features));
}

}  // namespace coughscreen::inference
