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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "coughscreen/app/service.h"
#include "coughscreen/audio/audio.h"
#include "coughscreen/dsp/embedding.h"
#include "coughscreen/dsp/features.h"
#include "coughscreen/dsp/gammatone.h"
#include "coughscreen/dsp/mel.h"
#include "coughscreen/evaluation/grid_search.h"
#include "coughscreen/evaluation/metrics.h"
#include "coughscreen/inference/tree_ensemble.h"
#include "coughscreen/screening/screening.h"
#include "coughscreen/sessions/analytics.h"
#include "coughscreen/sessions/sampler.h"
#include "httplib.h"
#include "test_support.h"

namespace cs = coughscreen;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first failure message; later ones only bump the count.
class Ledger {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ == 0) first_ = what;
  }
  Outcome Finish(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failure(s), first: " + first_};
  }

 private:
  int failures_ = 0;
  std::string first_;
};

std::string Fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

double Seconds(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::size_t MeanRowArgmax(const cs::Matrix& m) {
  std::size_t best = 0;
  double best_v = -1e300;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (double v : m.row(r)) s += v;
    if (s > best_v) {
      best_v = s;
      best = r;
    }
  }
  return best;
}

// ---- criteria

Outcome FeatureContract() {
  Ledger l;
  const cs::dsp::LogMelFrameProvider provider;
  int clips = 0;
  for (double seconds : {0.5, 1.0, 2.5, 5.0}) {
    for (int rate : {8000, 16000, 44100, 48000}) {
      const auto clip = cs::audio::Canonicalize(cs::testing::CoughLike(seconds, rate, rate + clips));
      const auto fv = cs::dsp::ExtractFeatureVector(clip, provider);
      l.Expect(fv.values.size() == 1356, "length " + std::to_string(fv.values.size()));
      if (seconds == 1.0) {
        const auto stats = cs::dsp::CochleagramStatistics(cs::dsp::ComputeCochleagram(clip));
        const auto emb = cs::dsp::Embed(clip, provider);
        for (std::size_t k = 0; k < 100; ++k) {
          for (std::size_t j = 0; j < 11; ++j) {
            l.Expect(fv.values[11 * k + j] == stats(k, j), "statistics block layout");
          }
        }
        for (std::size_t i = 0; i < 256; ++i) {
          l.Expect(fv.values[1100 + i] == emb.values[i], "embedding block layout");
        }
      }
      ++clips;
    }
  }
  double worst = 0.0;
  for (int run = 0; run < 3; ++run) {
    const auto raw = cs::testing::CoughLike(5.0, 44100, 90 + run);
    worst = std::max(worst, Seconds([&] {
                       cs::dsp::ExtractFeatureVector(cs::audio::Canonicalize(raw), provider);
                     }));
  }
  l.Expect(worst < 1.0, Fmt("5 s clip took %.3f s", worst));
  return l.Finish(std::to_string(clips) + " clips x 1356 values, 100x11 + 256 layout; 5 s clip " +
                  Fmt("%.3f s (< 1 s)", worst));
}

Outcome DspOracles() {
  Ledger l;
  // Mel argmax against closed-form centers.
  const auto mel_centers = cs::testing::OracleMelCenters(20.0, 24000.0, 128);
  int mel_tones = 0;
  for (int i = 0; i < 20; ++i) {
    const double hz = 150.0 * std::pow(20000.0 / 150.0, i / 19.0);
    const auto spec = cs::dsp::ComputeMelSpectrogram(cs::testing::Tone(hz, 0.5, 48000),
                                                     cs::dsp::SpectrogramConfig::Classifier());
    const int got = static_cast<int>(MeanRowArgmax(spec.values));
    const int want = cs::testing::NearestIndex(mel_centers, hz);
    l.Expect(std::abs(got - want) <= 1, Fmt("mel tone %.1f Hz off by %.0f bins", hz, got - want));
    ++mel_tones;
  }
  // Cochleagram channel RMS against the gammatone response oracle.
  const cs::dsp::GammatoneConfig gt;
  const auto erb = cs::testing::OracleErbCenters(gt.min_frequency,
                                                 gt.max_frequency_fraction * 48000, 100);
  int coch_tones = 0;
  for (int i = 0; i < 20; ++i) {
    const double hz = erb[2 + 5 * i];
    std::size_t want = 0;
    for (std::size_t k = 1; k < erb.size(); ++k) {
      if (cs::testing::OracleGammatonePower(hz, erb[k]) >
          cs::testing::OracleGammatonePower(hz, erb[want])) {
        want = k;
      }
    }
    const auto coch = cs::dsp::ComputeCochleagram(cs::testing::Tone(hz, 0.25, 48000));
    std::size_t got = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < coch.values.rows(); ++r) {
      const auto row = coch.values.row(r);
      double e = 0.0;
      for (std::size_t c = row.size() / 2; c < row.size(); ++c) e += row[c] * row[c];
      if (e > best) {
        best = e;
        got = r;
      }
    }
    l.Expect(got == want, Fmt("cochleagram tone %.1f Hz peaked in channel %.0f", hz,
                              static_cast<double>(got)));
    ++coch_tones;
  }
  // Statistics against 50-digit arithmetic.
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> len(1, 2000);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> row(len(rng));
    const double scale = std::pow(10.0, uni(rng));
    for (double& v : row) {
      switch (i % 4) {
        case 0: v = scale * normal(rng); break;
        case 1: v = scale * expo(rng); break;
        case 2: v = std::exp(normal(rng)); break;
        default: v = 3.0 + uni(rng); break;
      }
    }
    const auto got = cs::dsp::ComputeBinStatistics(row).ToArray();
    const auto want = cs::testing::OracleBinStatistics(row);
    for (std::size_t j = 0; j < 11; ++j) {
      const double err = want[j] == 0.0 ? std::abs(got[j])
                                        : std::abs(got[j] - want[j]) / std::abs(want[j]);
      worst = std::max(worst, err);
      l.Expect(err <= 1e-9, "row " + std::to_string(i) + " statistic " + std::to_string(j) +
                                Fmt(" relative error %.3g", err));
    }
  }
  return l.Finish(std::to_string(mel_tones) + " Mel tones within 1 bin, " +
                  std::to_string(coch_tones) + " cochleagram tones exact, 1000 rows " +
                  Fmt("max relative error %.2g (<= 1e-9)", worst));
}

Outcome DetectorPreprocessing() {
  Ledger l;
  int inputs = 0;
  for (double seconds : {0.001, 0.05, 0.5, 1.9, 2.0, 3.3, 10.0}) {
    for (int rate : {8000, 16000, 22050, 44100, 48000}) {
      for (int kind = 0; kind < 3; ++kind) {
        const auto clip = kind == 0   ? cs::testing::Noise(seconds, rate, inputs)
                          : kind == 1 ? cs::testing::Tone(700.0, seconds, rate)
                                      : cs::testing::Silence(seconds, rate);
        if (clip.empty()) continue;
        const auto spec = cs::dsp::DetectorSpectrogram(clip);
        l.Expect(spec.n_mels() == 128 && spec.frames() == 512,
                 std::to_string(spec.n_mels()) + "x" + std::to_string(spec.frames()));
        ++inputs;
      }
    }
  }
  const double floor = std::log(cs::dsp::kLogFloorPower);
  for (int rate : {8000, 44100}) {
    const auto spec = cs::dsp::DetectorSpectrogram(cs::testing::Silence(1.0, rate));
    for (double v : spec.values.data()) l.Expect(v == floor, Fmt("silence value %.6g", v));
  }
  return l.Finish(std::to_string(inputs) + " inputs all 128x512; silence equals log(1e-10)");
}

Outcome TreeInference() {
  Ledger l;
  std::mt19937_64 rng(1356);
  std::uniform_int_distribution<int> tick(-9, 9);
  std::uniform_int_distribution<int> tree_count(1, 5);
  for (int i = 0; i < 1000; ++i) {
    const auto doc = cs::testing::RandomTreeModel(rng, 24, tree_count(rng), 4);
    const auto model = cs::inference::LoadTreeEnsemble(doc);
    std::vector<double> x(24);
    for (double& v : x) v = tick(rng) / 8.0;
    l.Expect(cs::inference::EvalTreeEnsemble(model, x) ==
                 cs::testing::OracleTreeProbability(doc, x),
             "pair " + std::to_string(i));
  }
  const auto empty = cs::inference::LoadTreeEnsemble(
      json{{"feature_count", 1356}, {"base_score", 0.0}, {"trees", json::array()}});
  l.Expect(cs::inference::EvalTreeEnsemble(empty, std::vector<double>(1356, 0.3)) == 0.5,
           "empty model");
  return l.Finish("1000 random pairs bit-identical to the recursive oracle; empty model 0.5");
}

Outcome Stacking() {
  Ledger l;
  using cs::screening::StackingWeights;
  const auto v1 = StackingWeights::Variant1();
  const auto v2 = StackingWeights::Variant2();
  l.Expect(v1 == StackingWeights{0.02, 0.412, 0.284, 0.284}, "variant1 values");
  l.Expect(v2 == StackingWeights{0.20, 0.656, 0.0, 0.144}, "variant2 values");
  l.Expect(std::abs(v1.sum() - 1.0) <= 1e-9 && std::abs(v2.sum() - 1.0) <= 1e-9, "preset sums");

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    for (const auto& w : {v1, v2}) {
      const double hand = w.t * a + w.x * b + w.y * c + w.z * d;
      const double got = cs::screening::StackProbabilities({a, b, c, d}, w, false);
      worst = std::max(worst, std::abs(got - hand));
      l.Expect(std::abs(got - hand) <= 1e-12, Fmt("hand sum differs by %.3g", got - hand));
    }
  }
  for (int i = 0; i < 2000; ++i) {
    double raw[4] = {u(rng), u(rng), u(rng), u(rng)};
    if (i % 3 == 0) raw[i % 4] = 0.0;
    const double total = raw[0] + raw[1] + raw[2] + raw[3];
    StackingWeights w{raw[0] / total, raw[1] / total, raw[2] / total, 0.0};
    w.z = std::max(0.0, 1.0 - w.t - w.x - w.y);
    const double p[4] = {u(rng), u(rng), u(rng), u(rng)};
    const double s = cs::screening::StackProbabilities({p[0], p[1], p[2], p[3]}, w, false);
    l.Expect(s >= *std::min_element(p, p + 4) && s <= *std::max_element(p, p + 4), "convexity");
    const double ws[4] = {w.t, w.x, w.y, w.z};
    for (int k = 0; k < 4; ++k) {
      if (ws[k] <= 0.0) continue;
      double q[4] = {p[0], p[1], p[2], p[3]};
      q[k] = std::min(1.0, q[k] + u(rng) * 0.2);
      l.Expect(cs::screening::StackProbabilities({q[0], q[1], q[2], q[3]}, w, false) >= s,
               "monotonicity");
    }
  }
  return l.Finish(Fmt("presets sum to 1; 100 vectors max |diff| %.2g (<= 1e-12); ", worst) +
                  "2000 convexity/monotonicity cases");
}

Outcome Boundaries() {
  Ledger l;
  using cs::screening::Band;
  l.Expect(cs::screening::ScreeningVerdict(0.45).band == Band::kUncertain, "0.45");
  l.Expect(cs::screening::ScreeningVerdict(0.55).band == Band::kUncertain, "0.55");
  l.Expect(cs::screening::ScreeningVerdict(0.4499).band == Band::kNegative, "0.4499");
  l.Expect(cs::screening::ScreeningVerdict(0.5501).band == Band::kPositive, "0.5501");
  l.Expect(cs::screening::MakeGateDecision(0.25).accepted, "gate 0.25");
  l.Expect(!cs::screening::MakeGateDecision(0.2499).accepted, "gate 0.2499");
  for (int i = 0; i <= 10000; ++i) {
    const double p = i / 10000.0;
    const Band b = cs::screening::ScreeningVerdict(p).band;
    const Band want = p < 0.45 ? Band::kNegative : p > 0.55 ? Band::kPositive : Band::kUncertain;
    l.Expect(b == want, Fmt("band at %.4f", p));
    l.Expect(cs::screening::MakeGateDecision(p).accepted == (p >= 0.25), Fmt("gate at %.4f", p));
  }
  return l.Finish("0.45/0.55 uncertain, 0.4499/0.5501 outer, gate 0.25 accepts, 0.2499 rejects");
}

Outcome Metrics() {
  Ledger l;
  std::mt19937_64 rng(500);
  std::uniform_int_distribution<int> size(2, 300);
  std::uniform_int_distribution<int> levels(1, 50);
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    cs::evaluation::LabeledScores d;
    const int n = size(rng);
    const int lv = levels(rng);
    std::uniform_int_distribution<int> s(0, lv);
    for (int j = 0; j < n; ++j) {
      d.scores.push_back(s(rng) / static_cast<double>(lv));
      d.labels.push_back(coin(rng));
    }
    d.labels[0] = 1;
    d.labels[1] = 0;
    const auto twice = cs::testing::OraclePairTwiceU(d.scores, d.labels);
    l.Expect(cs::evaluation::MannWhitneyTwiceU(d) == twice, "pair count");
    const double oracle =
        static_cast<double>(twice) / (2.0 * d.positives() * d.negatives());
    const double auc = cs::evaluation::RocAuc(d);
    l.Expect(auc == oracle, "auc exact");
    const double area = cs::evaluation::TrapezoidArea(cs::evaluation::ComputeRocCurve(d));
    worst = std::max(worst, std::abs(area - auc));
    l.Expect(std::abs(area - auc) <= 1e-12, Fmt("trapezoid differs by %.3g", area - auc));
  }
  // Every way for the denominator to vanish, then the closed form.
  const cs::evaluation::ConfusionCounts degenerate[] = {
      {0, 5, 0, 3}, {0, 5, 3, 0}, {5, 0, 0, 3}, {5, 0, 3, 0}};
  for (const auto& c : degenerate) l.Expect(cs::evaluation::Mcc(c) == 0.0, "degenerate mcc");
  std::uniform_int_distribution<int> cnt(0, 100);
  for (int i = 0; i < 1000; ++i) {
    const cs::evaluation::ConfusionCounts c{static_cast<std::uint64_t>(cnt(rng)),
                                            static_cast<std::uint64_t>(cnt(rng)),
                                            static_cast<std::uint64_t>(cnt(rng)),
                                            static_cast<std::uint64_t>(cnt(rng))};
    const double want = cs::testing::OracleMcc(c.tp, c.tn, c.fp, c.fn);
    l.Expect(std::abs(cs::evaluation::Mcc(c) - want) <= 1e-12, "mcc formula");
  }
  l.Expect(cs::evaluation::Mcc({5, 5, 0, 0}) == 1.0 && cs::evaluation::Mcc({0, 0, 5, 5}) == -1.0,
           "mcc extremes");
  return l.Finish(Fmt("500 instances exact vs pair counting; trapezoid max |diff| %.2g; ", worst) +
                  "MCC closed form and 4 degenerate cases");
}

Outcome GridSearch() {
  Ledger l;
  using cs::evaluation::GridUnits;
  const std::vector<int> labels = {1, 1, 0, 0};
  const cs::evaluation::BranchScores fixture = {
      cs::evaluation::LabeledScores{{0.6, 0.4, 0.5, 0.3}, labels},
      cs::evaluation::LabeledScores{{0.9, 0.2, 0.3, 0.1}, labels},
      cs::evaluation::LabeledScores{{0.5, 0.5, 0.5, 0.5}, labels},
      cs::evaluation::LabeledScores{{0.2, 0.8, 0.1, 0.6}, labels}};
  // Hand enumeration of the ten half-step points, AUC by pair counting.
  double best = -1.0;
  GridUnits best_units{};
  for (int t = 0; t <= 2; ++t) {
    for (int x = 0; t + x <= 2; ++x) {
      for (int y = 0; t + x + y <= 2; ++y) {
        const int z = 2 - t - x - y;
        std::vector<double> s;
        for (std::size_t i = 0; i < 4; ++i) {
          s.push_back(t * fixture[0].scores[i] + x * fixture[1].scores[i] +
                      y * fixture[2].scores[i] + z * fixture[3].scores[i]);
        }
        const double auc = cs::testing::OraclePairTwiceU(s, labels) / 8.0;
        if (auc > best) {
          best = auc;
          best_units = {t, x, y, z};
        }
      }
    }
  }
  cs::evaluation::GridSearchOptions half;
  half.step = 0.5;
  const auto r = cs::evaluation::GridSearchWeights(fixture, half);
  l.Expect(r.units == best_units && r.metric == best, "step 0.5 enumeration");
  l.Expect(r.weights == cs::screening::StackingWeights{0.0, 0.5, 0.0, 0.5}, "step 0.5 weights");

  // Never below the best single branch.
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto make = [&](std::size_t n) {
    cs::evaluation::BranchScores b;
    std::vector<int> lab;
    for (std::size_t i = 0; i < n; ++i) lab.push_back(i % 3 == 0);
    for (int k = 0; k < 4; ++k) {
      b[k].labels = lab;
      for (int y : lab) {
        b[k].scores.push_back(1.0 / (1.0 + std::exp(-((0.3 + 0.4 * k) * y + noise(rng)))));
      }
    }
    return b;
  };
  for (int trial = 0; trial < 6; ++trial) {
    const auto b = make(150);
    cs::evaluation::GridSearchOptions o;
    o.step = trial % 2 ? 0.05 : 0.1;
    o.metric = trial % 3 == 2 ? cs::evaluation::GridMetric::kMcc : cs::evaluation::GridMetric::kAuc;
    const auto got = cs::evaluation::GridSearchWeights(b, o);
    const int n = cs::evaluation::GridDivisions(o.step);
    for (int k = 0; k < 4; ++k) {
      GridUnits u{};
      u[k] = n;
      l.Expect(got.metric >= cs::evaluation::EvaluateGridPoint(b, u, n, o.metric),
               "below a single branch");
    }
  }

  const auto big = make(1000);
  cs::evaluation::GridSearchOptions fine;
  fine.step = 0.004;
  cs::evaluation::GridSearchResult result;
  const double seconds = Seconds([&] { result = cs::evaluation::GridSearchWeights(big, fine); });
  l.Expect(seconds < 60.0, Fmt("step 0.004 took %.1f s", seconds));
  l.Expect(result.points_evaluated == 2667126, "grid size");
  return l.Finish("step 0.5 matches hand enumeration; >= best single branch; step 0.004 x 1000 " +
                  Fmt("items %.1f s (< 60 s, %.0f threads)", seconds,
                      static_cast<double>(std::thread::hardware_concurrency())));
}

Outcome Rerecording() {
  Ledger l;
  using cs::sessions::SubmissionRecord;
  const cs::sessions::TimestampMs t0 = 1767225600000, minute = 60000;
  auto rec = [](cs::sessions::TimestampMs t, bool ok) {
    SubmissionRecord r;
    r.device_id = "A";
    r.timestamp = t;
    r.gate = cs::sessions::StoredGate{ok ? 0.8 : 0.1, 0.25, ok, ok ? "" : "no_cough_detected"};
    return r;
  };
  const auto a = cs::sessions::RerecordingAnalysis({rec(t0, false), rec(t0 + 10 * minute, true)});
  l.Expect(a.sequences.size() == 1 && a.sequences[0].records.size() == 2 &&
               a.sequences[0].successful && a.rerecorded_fraction == 1.0,
           "reject, accept at +10 min");
  const auto b = cs::sessions::RerecordingAnalysis({rec(t0, false), rec(t0 + 25 * minute, true)});
  l.Expect(b.sequences.empty() && b.rerecorded_fraction == 0.0, "reject, next at +25 min");
  const auto c = cs::sessions::RerecordingAnalysis(
      {rec(t0, false), rec(t0 + 5 * minute, false), rec(t0 + 15 * minute, true)});
  l.Expect(c.sequences.size() == 1 && c.sequences[0].records.size() == 3 &&
               c.sequences[0].successful,
           "reject, reject, accept");

  const auto log = cs::testing::PlantedRerecordingLog(10000);
  const auto rep = cs::sessions::RerecordingAnalysis(log);
  const double rate = cs::sessions::RejectionRate(log);
  l.Expect(log.size() == 10000, "log size");
  l.Expect(std::abs(rate - 0.10) <= 0.015, Fmt("rejection %.4f", rate));
  l.Expect(std::abs(rep.rerecorded_fraction - 0.40) <= 0.015,
           Fmt("re-recorded %.4f", rep.rerecorded_fraction));
  l.Expect(std::abs(rep.success_fraction - 0.70) <= 0.015,
           Fmt("success %.4f", rep.success_fraction));
  return l.Finish("3 traced fixtures exact; 10k log " +
                  Fmt("rejection %.4f, re-recorded %.4f, ", rate, rep.rerecorded_fraction) +
                  Fmt("success %.4f (each within 0.015)", rep.success_fraction));
}

Outcome Sampler() {
  Ledger l;
  cs::sessions::BalancedSampler sampler(cs::testing::ThreeToOneManifest(), 20260101);
  int positives = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) positives += sampler.Next().label;
  const double rate = positives / static_cast<double>(draws);
  l.Expect(std::abs(rate - 0.5) <= 0.01, Fmt("positive rate %.4f", rate));
  return l.Finish(Fmt("positive draw rate %.4f over 100000 draws (0.5 +/- 0.01)", rate));
}

class Server {
 public:
  explicit Server(std::shared_ptr<cs::sessions::SubmissionStore> store)
      : service_(cs::testing::MakeStubRegistry({0.9, 0.3, 0.3, 0.3, 0.3},
                                               std::make_shared<cs::testing::StubCounters>()),
                 {}, std::move(store), "acceptance-token", {},
                 [this] { return now_ += 90000; }) {
    service_.Mount(http_);
    port_ = http_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
  }
  ~Server() {
    http_.stop();
    thread_.join();
  }
  httplib::Client Client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

 private:
  std::atomic<cs::sessions::TimestampMs> now_{1767225600000};
  cs::app::ScreeningService service_;
  httplib::Server http_;
  int port_ = 0;
  std::thread thread_;
};

Outcome ServiceContract() {
  Ledger l;
  const auto dir = cs::testing::TempDir("acceptance");
  const std::string log = (dir / "log.ndjson").string();
  const httplib::Headers admin = {{"Authorization", "Bearer acceptance-token"}};
  auto status = [](const httplib::Result& r) { return r ? r->status : -1; };
  json analytics;
  {
    Server server(std::make_shared<cs::sessions::SubmissionStore>(log));
    auto c = server.Client();
    auto created = c.Post("/v1/sessions", R"({"device_id": "acceptance-phone"})",
                          "application/json");
    l.Expect(status(created) == 201, "create");
    if (status(created) != 201) return l.Finish("");
    const std::string id = json::parse(created->body)["session_id"];
    const std::string upload = "/v1/sessions/" + id + "/recordings?kind=cough";

    auto rejected = c.Post(upload, cs::testing::WavBytes(cs::testing::Tone(500.0, 1.0, 16000)),
                           "audio/wav");
    l.Expect(status(rejected) == 200, "upload-reject status");
    if (status(rejected) == 200) {
      const json r = json::parse(rejected->body);
      l.Expect(r["gate"]["accepted"] == false && r["retry_prompt"] == true &&
                   r.contains("instructions"),
               "upload-reject body");
    }
    l.Expect(status(c.Post("/v1/sessions/" + id + "/predict", "", "application/json")) == 409,
             "predict before acceptance");
    auto accepted = c.Post(upload, cs::testing::WavBytes(cs::testing::CoughLike(1.5, 16000, 8)),
                           "audio/wav");
    l.Expect(status(accepted) == 200 &&
                 json::parse(accepted->body)["gate"]["accepted"] == true,
             "re-upload-accept");
    auto predicted = c.Post("/v1/sessions/" + id + "/predict", "", "application/json");
    l.Expect(status(predicted) == 200, "predict status");
    if (status(predicted) == 200) {
      const json p = json::parse(predicted->body);
      l.Expect(p["band"] == "negative-screen" && p.contains("disclaimer") &&
                   std::abs(p["probability"].get<double>() - 0.3) < 1e-9,
               "predict body");
    }
    auto a = c.Get("/v1/analytics", admin);
    l.Expect(status(a) == 200, "analytics status");
    if (status(a) == 200) {
      analytics = json::parse(a->body);
      l.Expect(analytics["gated_count"] == 2 && analytics["rejected_count"] == 1 &&
                   analytics["rerecording"]["sequences"] == 1 &&
                   analytics["rerecording"]["successful"] == 1,
               "analytics body");
    }
    l.Expect(status(c.Get("/v1/analytics")) == 401, "analytics without token");
  }
  Server replay(std::make_shared<cs::sessions::SubmissionStore>(log));
  auto c = replay.Client();
  auto again = c.Get("/v1/analytics", admin);
  l.Expect(status(again) == 200 && json::parse(again->body) == analytics, "replayed analytics");
  return l.Finish("create, reject, re-record, predict, analytics over HTTP; replay identical");
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"feature contract", FeatureContract},
      {"dsp oracles", DspOracles},
      {"detector preprocessing", DetectorPreprocessing},
      {"tree inference", TreeInference},
      {"stacking", Stacking},
      {"verdict band and gate", Boundaries},
      {"metrics", Metrics},
      {"grid search", GridSearch},
      {"re-recording analytics", Rerecording},
      {"balanced sampler", Sampler},
      {"service contract", ServiceContract},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
