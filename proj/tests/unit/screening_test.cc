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

#include <random>

#include "coughscreen/error.h"
#include "coughscreen/screening/pipeline.h"
#include "coughscreen/screening/screening.h"
#include "doctest.h"
#include "test_support.h"

namespace coughscreen::screening {
namespace {

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kRuntime;
}

ComponentProbabilities All(double p) { return {p, p, p, p}; }

TEST_CASE("presets") {
  const auto v1 = StackingWeights::Variant1();
  const auto v2 = StackingWeights::Variant2();
  CHECK(v1 == StackingWeights{0.02, 0.412, 0.284, 0.284});
  CHECK(v2 == StackingWeights{0.20, 0.656, 0.0, 0.144});
  CHECK(std::abs(v1.sum() - 1.0) <= kWeightSumTolerance);
  CHECK(std::abs(v2.sum() - 1.0) <= kWeightSumTolerance);
  CHECK(*StackingWeights::Preset("variant2") == v2);
  CHECK_FALSE(StackingWeights::Preset("variant3").has_value());
  CHECK(KindOf([] { StackingWeights{0.5, 0.6, 0, 0}.Validate(); }) ==
        ErrorKind::kInvalidArgument);
  CHECK(KindOf([] { StackingWeights{-0.1, 1.1, 0, 0}.Validate(); }) ==
        ErrorKind::kInvalidArgument);
}

TEST_CASE("stacking fixtures") {
  CHECK(StackProbabilities(All(0.7), StackingWeights::Variant1(), false) ==
        doctest::Approx(0.7));
  ComponentProbabilities no_breath{0.5, 0.5, std::nullopt, 0.5};
  CHECK(StackProbabilities(no_breath, StackingWeights::Variant2(), false) ==
        doctest::Approx(0.5));
  CHECK(StackProbabilities({1.0, 0.0, 0.0, 0.0}, StackingWeights::Variant1(), false) ==
        doctest::Approx(0.02));
}

TEST_CASE("missing components") {
  ComponentProbabilities no_voice{0.2, 0.6, 0.4, std::nullopt};
  const auto w = StackingWeights::Variant1();
  CHECK(KindOf([&] { StackProbabilities(no_voice, w, false); }) ==
        ErrorKind::kInvalidArgument);
  const double expect = (0.02 * 0.2 + 0.412 * 0.6 + 0.284 * 0.4) / (1.0 - 0.284);
  CHECK(StackProbabilities(no_voice, w, true) == doctest::Approx(expect).epsilon(1e-12));
  ComponentProbabilities only_breath{std::nullopt, std::nullopt, 0.3, std::nullopt};
  CHECK(KindOf([&] { StackProbabilities(only_breath, {0.5, 0.5, 0.0, 0.0}, true); }) ==
        ErrorKind::kUndefined);
}

TEST_CASE("stacking is convex and monotone") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    double raw[4] = {u(rng), u(rng), u(rng), u(rng)};
    const double total = raw[0] + raw[1] + raw[2] + raw[3];
    StackingWeights w{raw[0] / total, raw[1] / total, raw[2] / total, 0.0};
    w.z = 1.0 - w.t - w.x - w.y;
    ComponentProbabilities p{u(rng), u(rng), u(rng), u(rng)};
    const double s = StackProbabilities(p, w, false);
    const double lo = std::min({*p.dcnn, *p.gb, *p.gb_breath, *p.gb_voice});
    const double hi = std::max({*p.dcnn, *p.gb, *p.gb_breath, *p.gb_voice});
    CHECK(s >= lo);
    CHECK(s <= hi);
    auto bumped = p;
    *bumped.gb = std::min(1.0, *bumped.gb + 0.1);
    CHECK(StackProbabilities(bumped, w, false) >= s);
  }
}

TEST_CASE("verdict bands") {
  CHECK(ScreeningVerdict(0.45).band == Band::kUncertain);
  CHECK(ScreeningVerdict(0.50).band == Band::kUncertain);
  CHECK(ScreeningVerdict(0.55).band == Band::kUncertain);
  CHECK(ScreeningVerdict(0.4499).band == Band::kNegative);
  CHECK(ScreeningVerdict(0.5501).band == Band::kPositive);
  CHECK(ScreeningVerdict(0.2).band == Band::kNegative);
  CHECK(ScreeningVerdict(0.95).band == Band::kPositive);
  CHECK_FALSE(ScreeningVerdict(0.95).disclaimer.empty());
  CHECK(KindOf([] { ScreeningVerdict(1.5); }) == ErrorKind::kInvalidArgument);
  CHECK(KindOf([] { ScreeningVerdict(std::nan("")); }) == ErrorKind::kInvalidArgument);
  CHECK(BandName(Band::kPositive) == "positive-screen");
}

TEST_CASE("gate boundary") {
  CHECK(MakeGateDecision(0.25).accepted);
  CHECK_FALSE(MakeGateDecision(0.2499).accepted);
  CHECK_FALSE(MakeGateDecision(0.24).accepted);
  CHECK(MakeGateDecision(0.9).accepted);
  CHECK(MakeGateDecision(0.1).reason == "no_cough_detected");
  CHECK(MakeGateDecision(0.9).reason.empty());
}

TEST_CASE("silent clips are inaudible without running the detector") {
  auto counters = std::make_shared<testing::StubCounters>();
  const auto reg = testing::MakeStubRegistry({}, counters);
  const auto g = GateRecording(testing::Silence(1.0, 16000), reg->detector);
  CHECK_FALSE(g.accepted);
  CHECK(g.reason == "inaudible");
  CHECK(counters->detector == 0);
  CHECK(GateRecording(audio::AudioClip{{}, 16000}, reg->detector).reason == "inaudible");
}

TEST_CASE("pipeline with every branch at one half is uncertain") {
  auto counters = std::make_shared<testing::StubCounters>();
  const auto reg = testing::MakeStubRegistry({}, counters);
  SessionInputs in;
  in.cough = testing::CoughLike(1.5, 16000, 1);
  in.breath = testing::CoughLike(1.5, 16000, 2);
  in.voice = testing::CoughLike(1.5, 16000, 3);
  const auto r = RunFullPipeline(in, *reg);
  REQUIRE(r.verdict.has_value());
  CHECK(r.gate.accepted);
  CHECK(r.verdict->probability == doctest::Approx(0.5));
  CHECK(r.verdict->band == Band::kUncertain);
  CHECK(r.retry_suggested);
  CHECK(counters->dcnn == 1);
  CHECK(counters->embedding == 3);
}

TEST_CASE("gate rejection skips every branch") {
  auto counters = std::make_shared<testing::StubCounters>();
  testing::StubScores scores;
  scores.detector = 0.1;
  const auto reg = testing::MakeStubRegistry(scores, counters);
  SessionInputs in;
  in.cough = testing::CoughLike(1.0, 16000, 1);
  in.voice = testing::CoughLike(1.0, 16000, 2);
  const auto r = RunFullPipeline(in, *reg);
  CHECK_FALSE(r.gate.accepted);
  CHECK_FALSE(r.verdict.has_value());
  CHECK(r.retry_suggested);
  CHECK(counters->detector == 1);
  CHECK(counters->dcnn == 0);
  CHECK(counters->embedding == 0);
}

TEST_CASE("high branches give a positive screen, serial or parallel") {
  auto counters = std::make_shared<testing::StubCounters>();
  const auto reg = testing::MakeStubRegistry({0.9, 0.9, 0.9, 0.9, 0.9}, counters);
  SessionInputs in;
  in.cough = testing::CoughLike(1.0, 22050, 4);
  in.breath = testing::CoughLike(1.0, 22050, 5);
  in.voice = testing::CoughLike(1.0, 22050, 6);
  PipelineOptions serial;
  PipelineOptions parallel;
  parallel.parallel = true;
  const auto a = RunFullPipeline(in, *reg, serial);
  const auto b = RunFullPipeline(in, *reg, parallel);
  REQUIRE(a.verdict.has_value());
  CHECK(a.verdict->probability == doctest::Approx(0.9));
  CHECK(a.verdict->band == Band::kPositive);
  CHECK(a.final_probability == b.final_probability);
  CHECK(a.branches.gb_voice == b.branches.gb_voice);
}

TEST_CASE("symptom mixing") {
  auto counters = std::make_shared<testing::StubCounters>();
  auto reg = testing::MakeStubRegistry({0.9, 0.2, 0.2, 0.2, 0.2}, counters);
  inference::LogisticModel m;
  m.bias = 2.0;
  reg->symptom_model = m;
  SessionInputs in;
  in.cough = testing::CoughLike(1.0, 16000, 8);
  in.symptoms = inference::SymptomBitmap{};
  PipelineOptions opt;
  opt.symptom_weight = 0.5;
  const auto r = RunFullPipeline(in, *reg, opt);
  const double p_sym = 1.0 / (1.0 + std::exp(-2.0));
  REQUIRE(r.final_probability.has_value());
  CHECK(*r.symptom_probability == doctest::Approx(p_sym));
  CHECK(*r.final_probability == doctest::Approx(0.5 * 0.2 + 0.5 * p_sym));

  // Without symptoms the mix weight is ignored.
  in.symptoms.reset();
  CHECK(*RunFullPipeline(in, *reg, opt).final_probability == doctest::Approx(0.2));
}

TEST_CASE("registry gaps are configuration errors") {
  auto counters = std::make_shared<testing::StubCounters>();
  auto reg = testing::MakeStubRegistry({}, counters);
  reg->dcnn.members.clear();
  SessionInputs in;
  in.cough = testing::CoughLike(1.0, 16000, 1);
  CHECK(KindOf([&] { CheckRegistry(*reg, in, PipelineOptions{}); }) == ErrorKind::kConfig);
}

}  // namespace
}  // namespace coughscreen::screening
