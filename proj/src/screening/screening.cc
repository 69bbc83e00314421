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

#include "coughscreen/screening/screening.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "coughscreen/dsp/mel.h"
#include "coughscreen/error.h"

namespace coughscreen::screening {

StackingWeights StackingWeights::Variant1() { return {0.02, 0.412, 0.284, 0.284}; }

StackingWeights StackingWeights::Variant2() { return {0.20, 0.656, 0.0, 0.144}; }

std::optional<StackingWeights> StackingWeights::Preset(std::string_view name) {
  if (name == "variant1") return Variant1();
  if (name == "variant2") return Variant2();
  return std::nullopt;
}

void StackingWeights::Validate() const {
  for (double w : {t, x, y, z}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "stacking weights must be finite and non-negative");
    }
  }
  if (std::abs(sum() - 1.0) > kWeightSumTolerance) {
    throw Error(ErrorKind::kInvalidArgument,
                "stacking weights must sum to 1, got " + std::to_string(sum()));
  }
}

GateDecision MakeGateDecision(double score, double threshold) {
  GateDecision d;
  d.score = score;
  d.threshold = threshold;
  d.accepted = score >= threshold;
  if (!d.accepted) d.reason = "no_cough_detected";
  return d;
}

GateDecision GateRecording(const audio::AudioClip& clip,
                           const inference::ExternalModelHandle& detector,
                           double threshold) {
  if (clip.empty() || audio::IsSilent(clip)) {
    GateDecision d;
    d.score = 0.0;
    d.threshold = threshold;
    d.accepted = false;
    d.reason = "inaudible";
    return d;
  }
  const audio::AudioClip trimmed = audio::TrimSilence(clip);
  const double score =
      inference::RunExternalModel(detector, dsp::DetectorSpectrogram(trimmed));
  return MakeGateDecision(score, threshold);
}

double StackProbabilities(const ComponentProbabilities& p,
                          const StackingWeights& w, bool renormalize_missing) {
  w.Validate();
  const std::array<std::optional<double>, 4> values = {p.dcnn, p.gb, p.gb_breath,
                                                       p.gb_voice};
  const std::array<double, 4> weights = {w.t, w.x, w.y, w.z};
  static constexpr std::array<const char*, 4> kNames = {"dcnn", "gb", "gb_breath",
                                                        "gb_voice"};

  double total_weight = 0.0;
  bool all_present = true;
  for (std::size_t i = 0; i < 4; ++i) {
    if (values[i]) {
      const double v = *values[i];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::kInvalidArgument,
                    std::string("stack: component ") + kNames[i] +
                        " is not a probability");
      }
      total_weight += weights[i];
    } else if (weights[i] > 0.0) {
      all_present = false;
      if (!renormalize_missing) {
        throw Error(ErrorKind::kInvalidArgument,
                    std::string("stack: component ") + kNames[i] +
                        " is absent but has positive weight");
      }
    }
  }
  if (total_weight <= 0.0) {
    throw Error(ErrorKind::kUndefined, "stack: no component with positive weight");
  }

  double acc = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!values[i] || weights[i] == 0.0) continue;
    acc += weights[i] * *values[i];
    lo = std::min(lo, *values[i]);
    hi = std::max(hi, *values[i]);
  }
  if (!all_present) acc /= total_weight;
  return std::clamp(acc, lo, hi);
}

std::string_view BandName(Band band) {
  switch (band) {
    case Band::kNegative: return "negative-screen";
    case Band::kUncertain: return "uncertain";
    case Band::kPositive: return "positive-screen";
  }
  return "unknown";
}

Verdict ScreeningVerdict(double p, const UncertaintyBand& band) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "verdict: probability outside [0,1]");
  }
  Verdict v;
  v.probability = p;
  if (p < band.low) {
    v.band = Band::kNegative;
  } else if (p > band.high) {
    v.band = Band::kPositive;
  } else {
    v.band = Band::kUncertain;
  }
  return v;
}

}  // namespace coughscreen::screening
