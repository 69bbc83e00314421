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

// Bagged ensembles: the arithmetic mean of independently trained members.
//
// Bundle document (JSON):
//   {"kind": "cough" | "breath" | "voice" | "spectrogram",
//    "members": ["member0.json", ...]}
// Member paths are relative to the bundle file. Tree bundles hold tree
// ensemble documents; spectrogram bundles hold external model artifacts.

#ifndef COUGHSCREEN_INFERENCE_BAGGING_H_
#define COUGHSCREEN_INFERENCE_BAGGING_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coughscreen/inference/external_model.h"
#include "coughscreen/inference/tree_ensemble.h"

namespace coughscreen::inference {

inline constexpr std::size_t kBagSize = 10;

enum class BranchKind { kCough, kBreath, kVoice, kSpectrogram };

std::string_view BranchKindName(BranchKind kind);
std::optional<BranchKind> ParseBranchKind(std::string_view name);

template <typename Member>
struct BaggedEnsemble {
  BranchKind kind = BranchKind::kCough;
  std::vector<Member> members;
};

using TreeBundle = BaggedEnsemble<TreeEnsembleModel>;
using NetworkBundle = BaggedEnsemble<ExternalModelHandle>;

// Bundles with a member count other than 10 are accepted with a warning
// unless `strict`, in which case they raise Error{kConfig}.
void CheckBagSize(std::size_t members, std::string_view label, bool strict);

// Throws Error{kContract} if members disagree on feature_count and
// Error{kConfig} for an empty bundle.
void ValidateTreeBundle(const TreeBundle& bundle);
void ValidateNetworkBundle(const NetworkBundle& bundle);

// Mean member probability. Member failures are rethrown with the member
// index in the message.
double BaggedPredict(const TreeBundle& bundle, std::span<const double> features);
double BaggedPredict(const NetworkBundle& bundle, const dsp::MelSpectrogram& input);

TreeBundle LoadTreeBundle(const std::string& path, bool strict = false);
NetworkBundle LoadNetworkBundle(const std::string& path,
                                const TensorShape& input_shape,
                                bool strict = false);

}  // namespace coughscreen::inference

#endif  // COUGHSCREEN_INFERENCE_BAGGING_H_
