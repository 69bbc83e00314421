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

#include "coughscreen/sessions/manifest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "coughscreen/error.h"
#include "json.hpp"

namespace coughscreen::sessions {
namespace {

[[noreturn]] void ManifestError(const std::string& what) {
  throw Error(ErrorKind::kSchema, "manifest: " + what);
}

int ParseLabel(std::string_view s, std::size_t row) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  ManifestError("row " + std::to_string(row) + ": label must be 0 or 1, got '" +
                std::string(s) + "'");
}

bool ParseFlag(std::string_view s, std::size_t row) {
  if (s.empty() || s == "0" || s == "false" || s == "no") return false;
  if (s == "1" || s == "true" || s == "yes") return true;
  ManifestError("row " + std::to_string(row) + ": verified must be a boolean");
}

std::string Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return std::string(s);
}

void RejectDuplicates(const std::vector<ManifestEntry>& entries) {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.path.empty()) ManifestError("empty path");
    if (!seen.insert(e.path).second) ManifestError("duplicate path '" + e.path + "'");
  }
}

}  // namespace

std::string ManifestEntry::GroupKey() const {
  return dataset + "/" + sample_rate_class + "/" + device_class;
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(Trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) ManifestError("unterminated quote");
  fields.push_back(Trim(cur));
  return fields;
}

std::vector<ManifestEntry> ParseManifestCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::map<std::string, std::size_t> col;
  bool have_header = false;
  std::vector<ManifestEntry> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = i;
      if (!col.count("path")) ManifestError("missing 'path' column");
      if (!col.count("label")) ManifestError("missing 'label' column");
      have_header = true;
      continue;
    }
    auto get = [&](const char* name) -> std::string {
      auto it = col.find(name);
      if (it == col.end()) return {};
      if (it->second >= fields.size()) {
        ManifestError("row " + std::to_string(row) + ": too few columns");
      }
      return fields[it->second];
    };
    ManifestEntry e;
    e.path = get("path");
    e.label = ParseLabel(get("label"), row);
    e.dataset = get("dataset");
    e.sample_rate_class = get("sample_rate_class");
    e.device_class = get("device_class");
    e.verified = ParseFlag(get("verified"), row);
    out.push_back(std::move(e));
  }
  if (!have_header) ManifestError("missing header row");
  RejectDuplicates(out);
  return out;
}

std::vector<ManifestEntry> ParseManifestJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    ManifestError(e.what());
  }
  if (!doc.is_array()) ManifestError("expected an array of entries");
  std::vector<ManifestEntry> out;
  std::size_t row = 0;
  for (const auto& item : doc) {
    ++row;
    if (!item.is_object()) ManifestError("entry " + std::to_string(row) + " is not an object");
    if (!item.contains("path") || !item["path"].is_string()) {
      ManifestError("entry " + std::to_string(row) + ": missing 'path'");
    }
    if (!item.contains("label")) ManifestError("entry " + std::to_string(row) + ": missing 'label'");
    ManifestEntry e;
    e.path = item["path"].get<std::string>();
    const auto& label = item["label"];
    if (!label.is_number_integer()) {
      ManifestError("entry " + std::to_string(row) + ": label must be 0 or 1");
    }
    e.label = ParseLabel(std::to_string(label.get<long long>()), row);
    auto str = [&](const char* key) {
      return item.contains(key) && item[key].is_string() ? item[key].get<std::string>()
                                                         : std::string();
    };
    e.dataset = str("dataset");
    e.sample_rate_class = str("sample_rate_class");
    e.device_class = str("device_class");
    if (item.contains("verified")) {
      if (!item["verified"].is_boolean()) {
        ManifestError("entry " + std::to_string(row) + ": verified must be a boolean");
      }
      e.verified = item["verified"].get<bool>();
    }
    out.push_back(std::move(e));
  }
  RejectDuplicates(out);
  return out;
}

std::vector<ManifestEntry> LoadManifest(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::kStorage, "manifest: cannot read " + file);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    if (std::filesystem::path(file).extension() == ".json") {
      return ParseManifestJson(buf.str());
    }
    return ParseManifestCsv(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), file + ": " + e.what());
  }
}

std::string ResolvePath(const std::string& manifest_file, const std::string& entry_path) {
  const std::filesystem::path p(entry_path);
  if (p.is_absolute()) return entry_path;
  return (std::filesystem::path(manifest_file).parent_path() / p).string();
}

}  // namespace coughscreen::sessions
