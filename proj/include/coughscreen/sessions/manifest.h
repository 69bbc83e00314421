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

// Labeled dataset manifests.
//
// CSV: header row with columns path,label,dataset,sample_rate_class,
// device_class,verified in any order. path and label are required; missing
// group columns read as empty strings and a missing verified column as
// false. JSON: an array of objects with the same keys.

#ifndef COUGHSCREEN_SESSIONS_MANIFEST_H_
#define COUGHSCREEN_SESSIONS_MANIFEST_H_

#include <string>
#include <string_view>
#include <vector>

namespace coughscreen::sessions {

struct ManifestEntry {
  std::string path;
  int label = 0;
  std::string dataset;
  std::string sample_rate_class;
  std::string device_class;
  bool verified = false;

  // dataset/sample_rate_class/device_class
  std::string GroupKey() const;
};

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> SplitCsvLine(std::string_view line);

// Relative paths stay as written; ResolvePath joins them to a base.
std::vector<ManifestEntry> ParseManifestCsv(std::string_view text);
std::vector<ManifestEntry> ParseManifestJson(std::string_view text);

// Chooses the format by extension (.json, anything else is CSV). Throws
// Error{kStorage} when unreadable and Error{kSchema} for a missing label
// column, a bad label or a duplicate path (the message names the path).
std::vector<ManifestEntry> LoadManifest(const std::string& file);

// Entry path resolved against the manifest's directory.
std::string ResolvePath(const std::string& manifest_file, const std::string& entry_path);

}  // namespace coughscreen::sessions

#endif  // COUGHSCREEN_SESSIONS_MANIFEST_H_
