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

// Feature dumps for golden-file comparisons.
//
// A dump is a pair of files sharing a path prefix:
//   <prefix>.bin   rows*cols IEEE-754 float64 values, little endian,
//                  column-major: element (r, c) at index c * rows + r.
//   <prefix>.json  {"format": "coughscreen-feature-dump", "version": 1,
//                   "name", "rows", "cols", "dtype": "float64-le",
//                   "order": "column-major", "sample_rate",
//                   "config_hash": "fnv1a64:<16 hex digits>"}

#ifndef COUGHSCREEN_DSP_FEATURE_DUMP_H_
#define COUGHSCREEN_DSP_FEATURE_DUMP_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "coughscreen/dsp/gammatone.h"
#include "coughscreen/matrix.h"

namespace coughscreen::dsp {

struct DumpMetadata {
  std::string name;
  int sample_rate = 0;
  std::string config_hash;
};

struct FeatureDump {
  Matrix values;
  DumpMetadata metadata;
};

std::uint64_t Fnv1a64(std::string_view bytes);

// Canonical JSON text describing every feature-extraction parameter.
std::string FeatureConfigJson(const GammatoneConfig& gammatone,
                              std::string_view embedding_provider);
// "fnv1a64:" followed by 16 lowercase hex digits of FeatureConfigJson.
std::string FeatureConfigHash(const GammatoneConfig& gammatone,
                              std::string_view embedding_provider);

void WriteFeatureDump(const std::string& prefix, const Matrix& values,
                      const DumpMetadata& metadata);
// Throws Error{kNotFound} / Error{kSchema} on missing or inconsistent files.
FeatureDump ReadFeatureDump(const std::string& prefix);

}  // namespace coughscreen::dsp

#endif  // COUGHSCREEN_DSP_FEATURE_DUMP_H_
