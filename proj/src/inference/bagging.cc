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

#include "coughscreen/inference/bagging.h"

#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>

#include "coughscreen/error.h"
#include "json.hpp"

namespace coughscreen::inference {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct BundleDocument {
  BranchKind kind;
  std::vector<std::string> member_paths;
};

BundleDocument ReadBundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kLoad, "bundle: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, "bundle: " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string() ||
      !doc.contains("members") || !doc["members"].is_array()) {
    throw Error(ErrorKind::kSchema,
                "bundle: " + path + ": expected {\"kind\", \"members\"}");
  }
  const auto kind = ParseBranchKind(doc["kind"].get<std::string>());
  if (!kind) {
    throw Error(ErrorKind::kSchema, "bundle: " + path + ": unknown kind '" +
                                        doc["kind"].get<std::string>() + "'");
  }
  BundleDocument out{*kind, {}};
  const fs::path base = fs::path(path).parent_path();
  for (const auto& m : doc["members"]) {
    if (!m.is_string()) {
      throw Error(ErrorKind::kSchema, "bundle: " + path + ": members must be paths");
    }
    out.member_paths.push_back((base / m.get<std::string>()).string());
  }
  return out;
}

template <typename Fn>
double MeanOverMembers(std::size_t count, std::string_view kind, Fn&& member) {
  if (count == 0) {
    throw Error(ErrorKind::kConfig, std::string(kind) + " bundle has no members");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    try {
      sum += member(i);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(kind) + " bundle member " +
                                std::to_string(i) + ": " + e.what());
    }
  }
  return sum / static_cast<double>(count);
}

}  // namespace

std::string_view BranchKindName(BranchKind kind) {
  switch (kind) {
    case BranchKind::kCough: return "cough";
    case BranchKind::kBreath: return "breath";
    case BranchKind::kVoice: return "voice";
    case BranchKind::kSpectrogram: return "spectrogram";
  }
  return "unknown";
}

std::optional<BranchKind> ParseBranchKind(std::string_view name) {
  for (BranchKind k : {BranchKind::kCough, BranchKind::kBreath, BranchKind::kVoice,
                       BranchKind::kSpectrogram}) {
    if (BranchKindName(k) == name) return k;
  }
  return std::nullopt;
}

void CheckBagSize(std::size_t members, std::string_view label, bool strict) {
  if (members == kBagSize) return;
  if (strict) {
    throw Error(ErrorKind::kConfig, std::string(label) + " bundle has " +
                                        std::to_string(members) +
                                        " members, deployment requires 10");
  }
  spdlog::warn("{} bundle has {} members (deployment bundles carry {})", label,
               members, kBagSize);
}

void ValidateTreeBundle(const TreeBundle& bundle) {
  if (bundle.members.empty()) {
    throw Error(ErrorKind::kConfig,
                std::string(BranchKindName(bundle.kind)) + " bundle has no members");
  }
  const std::size_t width = bundle.members.front().feature_count;
  for (std::size_t i = 1; i < bundle.members.size(); ++i) {
    if (bundle.members[i].feature_count != width) {
      throw Error(ErrorKind::kContract,
                  std::string(BranchKindName(bundle.kind)) + " bundle member " +
                      std::to_string(i) + " expects " +
                      std::to_string(bundle.members[i].feature_count) +
                      " features, member 0 expects " + std::to_string(width));
    }
  }
}

void ValidateNetworkBundle(const NetworkBundle& bundle) {
  if (bundle.members.empty()) {
    throw Error(ErrorKind::kConfig,
                std::string(BranchKindName(bundle.kind)) + " bundle has no members");
  }
  const TensorShape& shape = bundle.members.front().input_shape();
  for (std::size_t i = 1; i < bundle.members.size(); ++i) {
    if (!(bundle.members[i].input_shape() == shape)) {
      throw Error(ErrorKind::kContract,
                  std::string(BranchKindName(bundle.kind)) + " bundle member " +
                      std::to_string(i) + " expects " +
                      bundle.members[i].input_shape().ToString() +
                      " input, member 0 expects " + shape.ToString());
    }
  }
}

double BaggedPredict(const TreeBundle& bundle, std::span<const double> features) {
  return MeanOverMembers(bundle.members.size(), BranchKindName(bundle.kind),
                         [&](std::size_t i) {
                           return EvalTreeEnsemble(bundle.members[i], features);
                         });
}

double BaggedPredict(const NetworkBundle& bundle, const dsp::MelSpectrogram& input) {
  return MeanOverMembers(bundle.members.size(), BranchKindName(bundle.kind),
                         [&](std::size_t i) {
                           return RunExternalModel(bundle.members[i], input);
                         });
}

TreeBundle LoadTreeBundle(const std::string& path, bool strict) {
  const BundleDocument doc = ReadBundle(path);
  if (doc.kind == BranchKind::kSpectrogram) {
    throw Error(ErrorKind::kSchema,
                "bundle: " + path + ": spectrogram bundles hold network artifacts");
  }
  TreeBundle bundle;
  bundle.kind = doc.kind;
  for (const auto& member : doc.member_paths) {
    bundle.members.push_back(LoadTreeEnsembleFile(member));
  }
  ValidateTreeBundle(bundle);
  CheckBagSize(bundle.members.size(), BranchKindName(bundle.kind), strict);
  return bundle;
}

NetworkBundle LoadNetworkBundle(const std::string& path,
                                const TensorShape& input_shape, bool strict) {
  const BundleDocument doc = ReadBundle(path);
  NetworkBundle bundle;
  bundle.kind = doc.kind;
  for (std::size_t i = 0; i < doc.member_paths.size(); ++i) {
    bundle.members.push_back(LoadExternalModel(
        std::string(BranchKindName(doc.kind)) + "[" + std::to_string(i) + "]",
        doc.member_paths[i], input_shape));
  }
  ValidateNetworkBundle(bundle);
  CheckBagSize(bundle.members.size(), BranchKindName(bundle.kind), strict);
  return bundle;
}

}  // namespace coughscreen::inference
