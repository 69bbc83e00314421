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

#include "test_support.h"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <fstream>
#include <numbers>

#include "coughscreen/dsp/embedding.h"
#include "coughscreen/dsp/features.h"
#include "coughscreen/inference/external_model.h"
#include "coughscreen/inference/tree_ensemble.h"

namespace coughscreen::testing {

using nlohmann::json;

audio::AudioClip Tone(double hz, double seconds, int sample_rate, double amplitude) {
  audio::AudioClip clip;
  clip.sample_rate = sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] =
        amplitude * std::sin(2.0 * std::numbers::pi * hz * i / sample_rate);
  }
  return clip;
}

audio::AudioClip Noise(double seconds, int sample_rate, std::uint64_t seed,
                       double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  audio::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(static_cast<std::size_t>(std::llround(seconds * sample_rate)));
  for (double& s : clip.samples) s = u(rng);
  return clip;
}

audio::AudioClip Silence(double seconds, int sample_rate) {
  audio::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(static_cast<std::size_t>(std::llround(seconds * sample_rate)),
                      0.0);
  return clip;
}

audio::AudioClip CoughLike(double seconds, int sample_rate, std::uint64_t seed) {
  audio::AudioClip clip = Noise(seconds, sample_rate, seed, 0.8);
  const double burst = 0.35;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double phase = std::fmod(t, 2.0 * burst);
    clip.samples[i] *= phase < burst ? std::exp(-8.0 * phase) : 0.02;
  }
  return clip;
}

std::string WavBytes(const audio::AudioClip& clip) {
  const auto bytes = audio::EncodeWav16(clip);
  return {bytes.begin(), bytes.end()};
}

// ---- Mel

double OracleHzToMel(double hz) {
  const double f_sp = 200.0 / 3.0;
  if (hz < 1000.0) return hz / f_sp;
  return 1000.0 / f_sp + 27.0 * std::log(hz / 1000.0) / std::log(6.4);
}

double OracleMelToHz(double mel) {
  const double f_sp = 200.0 / 3.0;
  const double break_mel = 1000.0 / f_sp;
  if (mel < break_mel) return mel * f_sp;
  return 1000.0 * std::pow(6.4, (mel - break_mel) / 27.0);
}

std::vector<double> OracleMelCenters(double fmin, double fmax, int n) {
  const double lo = OracleHzToMel(fmin);
  const double hi = OracleHzToMel(fmax);
  std::vector<double> out;
  for (int i = 1; i <= n; ++i) out.push_back(OracleMelToHz(lo + (hi - lo) * i / (n + 1)));
  return out;
}

int NearestIndex(const std::vector<double>& centers, double hz) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(centers.size()); ++i) {
    if (std::abs(centers[i] - hz) < std::abs(centers[best] - hz)) best = i;
  }
  return best;
}

// ---- gammatone

namespace {
constexpr double kEarQ = 9.26449;
constexpr double kMinBw = 24.7;

double ErbRate(double f) { return kEarQ * std::log(1.0 + f / (kEarQ * kMinBw)); }
double InverseErbRate(double e) { return (std::exp(e / kEarQ) - 1.0) * kEarQ * kMinBw; }
}  // namespace

std::vector<double> OracleErbCenters(double low, double high, int n) {
  const double a = ErbRate(low);
  const double b = ErbRate(high);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(InverseErbRate(a + (b - a) * i / (n - 1)));
  return out;
}

double OracleGammatonePower(double f, double fc) {
  const double b = 1.019 * (fc / kEarQ + kMinBw);
  const double r = (f - fc) / b;
  return std::pow(1.0 + r * r, -4.0);
}

// ---- statistics

std::array<double, 11> OracleBinStatistics(std::span<const double> row) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const std::size_t n = row.size();
  std::vector<Big> v(row.begin(), row.end());
  std::sort(v.begin(), v.end());
  Big sum = 0, sq = 0;
  for (const Big& x : v) {
    sum += x;
    sq += x * x;
  }
  const Big mean = sum / n;
  Big m2 = 0, m3 = 0, m4 = 0;
  for (const Big& x : v) {
    const Big d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Big skew = 0, kurt = 0;
  if (m2 > 0) {
    skew = m3 / pow(m2, Big(1.5));
    kurt = m4 / (m2 * m2) - 3;
  }
  auto quantile = [&](int num, int den) {
    // position (n - 1) * num / den, exact in integers
    const std::size_t scaled = (n - 1) * num;
    const std::size_t lo = scaled / den;
    const Big frac = Big(scaled % den) / den;
    if (lo + 1 >= n) return v[lo];
    return v[lo] + frac * (v[lo + 1] - v[lo]);
  };
  const Big q1 = quantile(1, 4);
  const Big q3 = quantile(3, 4);
  return {mean.convert_to<double>(),
          quantile(1, 2).convert_to<double>(),
          sqrt(m2).convert_to<double>(),
          skew.convert_to<double>(),
          kurt.convert_to<double>(),
          v.front().convert_to<double>(),
          v.back().convert_to<double>(),
          q1.convert_to<double>(),
          q3.convert_to<double>(),
          (q3 - q1).convert_to<double>(),
          sqrt(sq).convert_to<double>()};
}

// ---- trees

namespace {

double Walk(const json& nodes, std::size_t index, std::span<const double> x) {
  const json& node = nodes.at(index);
  if (node.contains("leaf")) return node["leaf"].get<double>();
  const auto feature = node["feature"].get<std::size_t>();
  const double threshold = node["threshold"].get<double>();
  return Walk(nodes, x[feature] < threshold ? node["left"].get<std::size_t>()
                                            : node["right"].get<std::size_t>(),
              x);
}

void Grow(std::mt19937_64& rng, json& nodes, std::size_t index, int depth,
          std::size_t feature_count) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::bernoulli_distribution stop(depth == 0 ? 0.0 : 0.3);
  if (depth == 0 || stop(rng)) {
    nodes[index] = {{"leaf", value(rng)}};
    return;
  }
  std::uniform_int_distribution<std::size_t> feature(0, feature_count - 1);
  // Coarse thresholds so that test vectors hit them exactly now and then.
  std::uniform_int_distribution<int> tick(-8, 8);
  const std::size_t left = nodes.size();
  nodes.push_back(nullptr);
  const std::size_t right = nodes.size();
  nodes.push_back(nullptr);
  nodes[index] = {{"feature", feature(rng)},
                  {"threshold", tick(rng) / 8.0},
                  {"left", left},
                  {"right", right}};
  Grow(rng, nodes, left, depth - 1, feature_count);
  Grow(rng, nodes, right, depth - 1, feature_count);
}

}  // namespace

double OracleTreeMargin(const json& model, std::span<const double> x) {
  double margin = model.value("base_score", 0.0);
  for (const json& tree : model["trees"]) margin += Walk(tree["nodes"], 0, x);
  return margin;
}

double OracleTreeProbability(const json& model, std::span<const double> x) {
  const double m = OracleTreeMargin(model, x);
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

json RandomTreeModel(std::mt19937_64& rng, std::size_t feature_count,
                     std::size_t trees, int max_depth) {
  std::uniform_real_distribution<double> base(-0.5, 0.5);
  std::uniform_int_distribution<int> depth(0, max_depth);
  json model = {{"feature_count", feature_count},
                {"base_score", base(rng)},
                {"trees", json::array()}};
  for (std::size_t t = 0; t < trees; ++t) {
    json nodes = json::array({nullptr});
    Grow(rng, nodes, 0, depth(rng), feature_count);
    model["trees"].push_back({{"nodes", nodes}});
  }
  return model;
}

json ConstantTreeModel(double p, std::size_t feature_count) {
  return {{"feature_count", feature_count},
          {"base_score", std::log(p / (1.0 - p))},
          {"trees", json::array()}};
}

// ---- metrics

std::uint64_t OraclePairTwiceU(std::span<const double> scores,
                               std::span<const int> labels) {
  std::uint64_t twice = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j]) twice += 2;
      if (scores[i] == scores[j]) twice += 1;
    }
  }
  return twice;
}

double OracleMcc(double tp, double tn, double fp, double fn) {
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(den);
}

// ---- stubs

namespace {

// Tonal input: one Mel row dominates the median row by a wide margin.
bool IsTonal(const dsp::MelSpectrogram& spec) {
  std::vector<double> rows(spec.n_mels());
  for (std::size_t r = 0; r < spec.n_mels(); ++r) {
    double s = 0.0;
    for (double v : spec.values.row(r)) s += v;
    rows[r] = s / static_cast<double>(spec.frames());
  }
  const double peak = *std::max_element(rows.begin(), rows.end());
  std::nth_element(rows.begin(), rows.begin() + rows.size() / 2, rows.end());
  return peak - rows[rows.size() / 2] > 8.0;
}

class CountingProvider : public dsp::EmbeddingProvider {
 public:
  explicit CountingProvider(std::shared_ptr<StubCounters> counters)
      : counters_(std::move(counters)) {}
  std::string name() const override { return "counting"; }
  std::vector<std::vector<double>> Frames(const audio::AudioClip&) const override {
    ++counters_->embedding;
    return std::vector<std::vector<double>>(3,
                                            std::vector<double>(dsp::kProviderFrameWidth, 0.25));
  }

 private:
  std::shared_ptr<StubCounters> counters_;
};

inference::TreeBundle ConstantBundle(inference::BranchKind kind, double p) {
  inference::TreeBundle bundle{kind, {}};
  bundle.members.push_back(
      inference::LoadTreeEnsemble(ConstantTreeModel(p, dsp::kFeatureLength)));
  return bundle;
}

}  // namespace

std::shared_ptr<screening::ModelRegistry> MakeStubRegistry(
    const StubScores& scores, std::shared_ptr<StubCounters> counters) {
  auto r = std::make_shared<screening::ModelRegistry>();
  const double detector = scores.detector;
  r->detector = inference::ExternalModelHandle(
      "stub-detector", inference::DetectorInputShape(),
      std::make_shared<inference::FunctionBackend>(
          [counters, detector](const dsp::MelSpectrogram& spec) {
            ++counters->detector;
            return IsTonal(spec) ? 0.1 : detector;
          }));
  const double dcnn = scores.dcnn;
  r->dcnn.members.push_back(inference::ExternalModelHandle(
      "stub-dcnn", inference::ClassifierInputShape(),
      std::make_shared<inference::FunctionBackend>(
          [counters, dcnn](const dsp::MelSpectrogram&) {
            ++counters->dcnn;
            return dcnn;
          })));
  r->gb_cough = ConstantBundle(inference::BranchKind::kCough, scores.gb);
  r->gb_breath = ConstantBundle(inference::BranchKind::kBreath, scores.gb_breath);
  r->gb_voice = ConstantBundle(inference::BranchKind::kVoice, scores.gb_voice);
  r->embedding = std::make_shared<CountingProvider>(std::move(counters));
  return r;
}

namespace {
void WriteJson(const std::filesystem::path& path, const json& doc) {
  std::ofstream(path) << doc.dump();
}
}  // namespace

std::string WriteStubModelDir(const std::filesystem::path& dir,
                              const StubScores& scores) {
  std::filesystem::create_directories(dir);
  WriteJson(dir / "detector.json", {{"format", "constant"}, {"probability", scores.detector}});
  WriteJson(dir / "dcnn_member.json", {{"format", "constant"}, {"probability", scores.dcnn}});
  WriteJson(dir / "dcnn.json", {{"kind", "spectrogram"}, {"members", {"dcnn_member.json"}}});
  const std::array<std::pair<std::string, double>, 3> trees = {
      std::pair{std::string("cough"), scores.gb},
      std::pair{std::string("breath"), scores.gb_breath},
      std::pair{std::string("voice"), scores.gb_voice}};
  for (const auto& [kind, p] : trees) {
    WriteJson(dir / ("gb_" + kind + "_member.json"),
              ConstantTreeModel(p, dsp::kFeatureLength));
    WriteJson(dir / ("gb_" + kind + ".json"),
              {{"kind", kind}, {"members", {"gb_" + kind + "_member.json"}}});
  }
  const json config = {{"models",
                        {{"detector", "detector.json"},
                         {"dcnn_bundle", "dcnn.json"},
                         {"gb_cough_bundle", "gb_cough.json"},
                         {"gb_breath_bundle", "gb_breath.json"},
                         {"gb_voice_bundle", "gb_voice.json"}}}};
  WriteJson(dir / "config.json", config);
  return (dir / "config.json").string();
}

// ---- logs

std::vector<sessions::SubmissionRecord> PlantedRerecordingLog(std::uint64_t seed) {
  using Pattern = std::vector<bool>;  // accepted flags
  std::vector<Pattern> units;
  for (int i = 0; i < 110; ++i) units.push_back({false, true});
  for (int i = 0; i < 100; ++i) units.push_back({false, false, true});
  for (int i = 0; i < 90; ++i) units.push_back({false, false});
  for (int i = 0; i < 510; ++i) units.push_back({false});
  for (int i = 0; i < 8790; ++i) units.push_back({true});
  std::mt19937_64 rng(seed);
  std::shuffle(units.begin(), units.end(), rng);

  constexpr int kDevices = 250;
  constexpr sessions::TimestampMs kMinute = 60 * 1000;
  std::vector<sessions::TimestampMs> cursor(kDevices, 1767225600000);  // 2026-01-01
  std::uniform_int_distribution<sessions::TimestampMs> apart(21 * kMinute, 180 * kMinute);
  std::uniform_int_distribution<sessions::TimestampMs> within(kMinute, 20 * kMinute);

  std::vector<sessions::SubmissionRecord> log;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const std::size_t device = u % kDevices;
    cursor[device] += apart(rng);
    for (std::size_t i = 0; i < units[u].size(); ++i) {
      if (i > 0) cursor[device] += within(rng);
      sessions::SubmissionRecord r;
      r.session_id = "s" + std::to_string(u);
      r.device_id = "device-" + std::to_string(device);
      r.timestamp = cursor[device];
      const bool ok = units[u][i];
      r.gate = sessions::StoredGate{ok ? 0.8 : 0.1, 0.25, ok, ok ? "" : "no_cough_detected"};
      log.push_back(std::move(r));
    }
  }
  std::shuffle(log.begin(), log.end(), rng);
  return log;
}

std::vector<sessions::ManifestEntry> ThreeToOneManifest() {
  std::vector<sessions::ManifestEntry> out;
  for (int i = 0; i < 4; ++i) {
    sessions::ManifestEntry e;
    e.path = "clip" + std::to_string(i) + ".wav";
    e.label = i < 3 ? 1 : 0;
    e.dataset = "fixture";
    e.sample_rate_class = "48k";
    e.device_class = "phone";
    out.push_back(e);
  }
  return out;
}

std::filesystem::path TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("coughscreen-" + tag + "-" + std::to_string(rd()) + "-" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace coughscreen::testing
