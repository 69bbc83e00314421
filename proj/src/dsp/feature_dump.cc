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

#include "coughscreen/dsp/feature_dump.h"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "coughscreen/dsp/mel.h"
#include "coughscreen/error.h"
#include "json.hpp"

namespace coughscreen::dsp {
namespace {

using json = nlohmann::json;

constexpr const char* kFormat = "coughscreen-feature-dump";
constexpr int kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "feature dumps assume a little-endian host");

json SpectrogramJson(const SpectrogramConfig& c) {
  return {{"sample_rate", c.sample_rate}, {"window_length", c.window_length},
          {"fft_size", c.fft_size},       {"hop_length", c.hop_length},
          {"n_mels", c.n_mels},           {"fmin", c.fmin},
          {"fmax", c.fmax},               {"positional", c.positional_channel},
          {"log_floor", kLogFloorPower}};
}

}  // namespace

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string FeatureConfigJson(const GammatoneConfig& gammatone,
                              std::string_view embedding_provider) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  const json config = {
      {"classifier", SpectrogramJson(SpectrogramConfig::Classifier())},
      {"detector", SpectrogramJson(SpectrogramConfig::Detector())},
      {"classifier_frames", kClassifierFrames},
      {"detector_frames", kDetectorFrames},
      {"gammatone",
       {{"channels", gammatone.channels},
        {"min_frequency", gammatone.min_frequency},
        {"max_frequency_fraction", gammatone.max_frequency_fraction},
        {"ear_q", gammatone.ear_q},
        {"min_bandwidth", gammatone.min_bandwidth}}},
      {"embedding_provider", embedding_provider},
  };
  return config.dump();
}

std::string FeatureConfigHash(const GammatoneConfig& gammatone,
                              std::string_view embedding_provider) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    Fnv1a64(FeatureConfigJson(gammatone, embedding_provider))));
  return std::string("fnv1a64:") + buf;
}

void WriteFeatureDump(const std::string& prefix, const Matrix& values,
                      const DumpMetadata& metadata) {
  std::vector<double> column_major(values.rows() * values.cols());
  for (std::size_t c = 0; c < values.cols(); ++c) {
    for (std::size_t r = 0; r < values.rows(); ++r) {
      column_major[c * values.rows() + r] = values(r, c);
    }
  }
  {
    std::ofstream bin(prefix + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw Error(ErrorKind::kStorage, "dump: cannot write " + prefix + ".bin");
    bin.write(reinterpret_cast<const char*>(column_major.data()),
              static_cast<std::streamsize>(column_major.size() * sizeof(double)));
  }
  const json meta = {{"format", kFormat},
                     {"version", kVersion},
                     {"name", metadata.name},
                     {"rows", values.rows()},
                     {"cols", values.cols()},
                     {"dtype", "float64-le"},
                     {"order", "column-major"},
                     {"sample_rate", metadata.sample_rate},
                     {"config_hash", metadata.config_hash}};
  std::ofstream out(prefix + ".json", std::ios::trunc);
  if (!out) throw Error(ErrorKind::kStorage, "dump: cannot write " + prefix + ".json");
  out << meta.dump(2) << "\n";
}

FeatureDump ReadFeatureDump(const std::string& prefix) {
  std::ifstream meta_in(prefix + ".json");
  if (!meta_in) throw Error(ErrorKind::kNotFound, "dump: missing " + prefix + ".json");
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("dump: bad metadata: ") + e.what());
  }
  if (meta.value("format", "") != kFormat || meta.value("version", 0) != kVersion ||
      meta.value("dtype", "") != "float64-le" ||
      meta.value("order", "") != "column-major") {
    throw Error(ErrorKind::kSchema, "dump: unsupported metadata in " + prefix + ".json");
  }
  const auto rows = meta.at("rows").get<std::size_t>();
  const auto cols = meta.at("cols").get<std::size_t>();

  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw Error(ErrorKind::kNotFound, "dump: missing " + prefix + ".bin");
  std::vector<char> raw((std::istreambuf_iterator<char>(bin)),
                        std::istreambuf_iterator<char>());
  if (raw.size() != rows * cols * sizeof(double)) {
    throw Error(ErrorKind::kSchema, "dump: " + prefix + ".bin has " +
                                        std::to_string(raw.size()) +
                                        " bytes, metadata implies " +
                                        std::to_string(rows * cols * 8));
  }
  FeatureDump dump;
  dump.values = Matrix(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      double v;
      std::memcpy(&v, raw.data() + (c * rows + r) * sizeof(double), sizeof(double));
      dump.values(r, c) = v;
    }
  }
  dump.metadata.name = meta.value("name", "");
  dump.metadata.sample_rate = meta.value("sample_rate", 0);
  dump.metadata.config_hash = meta.value("config_hash", "");
  return dump;
}

}  // namespace coughscreen::dsp
