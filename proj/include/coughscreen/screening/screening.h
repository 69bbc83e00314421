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

// Quality gate, probability stacking and verdict banding.

#ifndef COUGHSCREEN_SCREENING_SCREENING_H_
#define COUGHSCREEN_SCREENING_SCREENING_H_

#include <optional>
#include <string>
#include <string_view>

#include "coughscreen/audio/audio.h"
#include "coughscreen/inference/external_model.h"

namespace coughscreen::screening {

inline constexpr double kDefaultGateThreshold = 0.25;
inline constexpr double kWeightSumTolerance = 1e-9;

inline constexpr std::string_view kDisclaimer =
    "This is a screening aid, not a diagnosis, and it is not medical advice. "
    "If you feel unwell or think you may have been exposed to an infection, "
    "get a clinical test and talk to a healthcare professional.";

// Stacking weights for the spectrogram network (t) and the cough (x),
// breath (y) and voice (z) tree ensembles.
struct StackingWeights {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  // 0.02 / 0.412 / 0.284 / 0.284
  static StackingWeights Variant1();
  // 0.20 / 0.656 / 0.0 / 0.144
  static StackingWeights Variant2();
  // "variant1" or "variant2".
  static std::optional<StackingWeights> Preset(std::string_view name);

  double sum() const { return t + x + y + z; }
  // Throws Error{kInvalidArgument} unless all >= 0 and |sum - 1| <= 1e-9.
  void Validate() const;

  friend bool operator==(const StackingWeights&, const StackingWeights&) = default;
};

struct ComponentProbabilities {
  std::optional<double> dcnn;
  std::optional<double> gb;
  std::optional<double> gb_breath;
  std::optional<double> gb_voice;
};

struct GateDecision {
  double score = 0.0;
  bool accepted = false;
  double threshold = kDefaultGateThreshold;
  // Empty when accepted; "no_cough_detected" or "inaudible" otherwise.
  std::string reason;
};

// accepted iff score >= threshold.
GateDecision MakeGateDecision(double score, double threshold = kDefaultGateThreshold);

// Runs the detector on the trimmed recording's detector spectrogram. Empty
// or digitally silent clips are rejected as "inaudible" without running the
// detector.
GateDecision GateRecording(const audio::AudioClip& clip,
                           const inference::ExternalModelHandle& detector,
                           double threshold = kDefaultGateThreshold);

// Weighted sum t*p_dcnn + x*p_gb + y*p_gb_breath + z*p_gb_voice.
//
// Without renormalization every component with a positive weight must be
// present (Error{kInvalidArgument} otherwise). With renormalization absent
// components get weight 0 and the rest are rescaled to sum to 1; if nothing
// with positive weight remains the stack is undefined (Error{kUndefined}).
// The result is clamped to the range of the contributing components so that
// rounding can never push it outside.
double StackProbabilities(const ComponentProbabilities& p,
                          const StackingWeights& w, bool renormalize_missing);

enum class Band { kNegative, kUncertain, kPositive };
std::string_view BandName(Band band);  // negative-screen / uncertain / positive-screen

struct UncertaintyBand {
  double low = 0.45;
  double high = 0.55;
};

struct Verdict {
  double probability = 0.0;
  Band band = Band::kUncertain;
  std::string disclaimer{kDisclaimer};
};

// Uncertain iff low <= p <= high (both ends inclusive). Throws
// Error{kInvalidArgument} for p outside [0, 1] or NaN.
Verdict ScreeningVerdict(double p, const UncertaintyBand& band = {});

}  // namespace coughscreen::screening

#endif  // COUGHSCREEN_SCREENING_SCREENING_H_
