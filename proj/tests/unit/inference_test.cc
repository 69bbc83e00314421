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

#include <cmath>
#include <fstream>
#include <random>

#include "coughscreen/error.h"
#include "coughscreen/inference/bagging.h"
#include "coughscreen/inference/external_model.h"
#include "coughscreen/inference/logistic.h"
#include "coughscreen/inference/tree_ensemble.h"
#include "doctest.h"
#include "test_support.h"

namespace coughscreen::inference {
namespace {

using nlohmann::json;

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kRuntime;
}

json Stump() {
  return {{"feature_count", 5},
          {"base_score", 0.0},
          {"trees",
           {{{"nodes",
              {{{"feature", 3}, {"threshold", 0.5}, {"left", 1}, {"right", 2}},
               {{"leaf", -1.0}},
               {{"leaf", 2.0}}}}}}}};
}

dsp::MelSpectrogram Blank(std::size_t rows, std::size_t cols) {
  dsp::MelSpectrogram s;
  s.values = Matrix(rows, cols);
  return s;
}

TEST_CASE("tree ensemble fixtures") {
  const json empty = {{"trees", json::array()}, {"base_score", 0}, {"feature_count", 1356}};
  const auto model = LoadTreeEnsemble(empty);
  CHECK(EvalTreeEnsemble(model, std::vector<double>(1356, 3.0)) == 0.5);

  const auto stump = LoadTreeEnsemble(Stump());
  std::vector<double> x = {0, 0, 0, 0.2, 0};
  CHECK(EvalTreeEnsemble(stump, x) == doctest::Approx(0.2689414214));
  x[3] = 0.5;  // ties go right
  CHECK(EvalTreeEnsemble(stump, x) == doctest::Approx(0.8807970780));
  CHECK_THROWS_AS(EvalTreeEnsemble(stump, std::vector<double>(4)), Error);

  CHECK(LoadTreeEnsemble(SaveTreeEnsemble(stump)) == stump);
}

TEST_CASE("tree ensemble schema errors name the node") {
  json bad = Stump();
  bad["feature_count"] = 3;
  try {
    LoadTreeEnsemble(bad);
    FAIL("accepted an out-of-range feature");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSchema);
    CHECK(std::string(e.what()).find("trees[0].nodes[0]") != std::string::npos);
  }
  json cyclic = Stump();
  cyclic["trees"][0]["nodes"][0]["left"] = 0;
  CHECK(KindOf([&] { LoadTreeEnsemble(cyclic); }) == ErrorKind::kSchema);
  json extra = Stump();
  extra["colour"] = "blue";
  CHECK(KindOf([&] { LoadTreeEnsemble(extra); }) == ErrorKind::kSchema);
}

TEST_CASE("tree ensemble equals the recursive oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> tick(-9, 9);
  for (int i = 0; i < 300; ++i) {
    const json doc = testing::RandomTreeModel(rng, 12, 1 + i % 5, 4);
    const auto model = LoadTreeEnsemble(doc);
    std::vector<double> x(12);
    for (double& v : x) v = tick(rng) / 8.0;
    CHECK(EvalTreeEnsemble(model, x) == testing::OracleTreeProbability(doc, x));
    // Monotone in base_score.
    auto shifted = model;
    shifted.base_score += 0.25;
    CHECK(EvalTreeEnsemble(shifted, x) >= EvalTreeEnsemble(model, x));
  }
}

TEST_CASE("bagged prediction is the member mean") {
  TreeBundle bundle{BranchKind::kCough, {}};
  bundle.members.push_back(LoadTreeEnsemble(testing::ConstantTreeModel(0.2, 4)));
  bundle.members.push_back(LoadTreeEnsemble(testing::ConstantTreeModel(0.4, 4)));
  CHECK(BaggedPredict(bundle, std::vector<double>(4)) == doctest::Approx(0.3));
  bundle.members.push_back(LoadTreeEnsemble(testing::ConstantTreeModel(0.4, 5)));
  CHECK_THROWS_AS(ValidateTreeBundle(bundle), Error);

  NetworkBundle nets{BranchKind::kSpectrogram, {}};
  for (double p : {0.1, 0.5, 0.6}) {
    nets.members.emplace_back("m", TensorShape{1, 4, 6},
                              std::make_shared<ConstantBackend>(p));
  }
  const double mean = BaggedPredict(nets, Blank(4, 6));
  CHECK(mean == doctest::Approx(0.4));
  CHECK(mean >= 0.1);
  CHECK(mean <= 0.6);
  try {
    BaggedPredict(nets, Blank(4, 5));
    FAIL("shape mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kContract);
    CHECK(std::string(e.what()).find("member 0") != std::string::npos);
  }
}

TEST_CASE("bag size is a warning unless strict") {
  CHECK_NOTHROW(CheckBagSize(2, "cough", false));
  CHECK(KindOf([] { CheckBagSize(2, "cough", true); }) == ErrorKind::kConfig);
  CHECK_NOTHROW(CheckBagSize(kBagSize, "cough", true));
}

TEST_CASE("bundles load from disk") {
  const auto dir = testing::TempDir("bundle");
  for (int i = 0; i < 2; ++i) {
    std::ofstream(dir / ("m" + std::to_string(i) + ".json"))
        << testing::ConstantTreeModel(i == 0 ? 0.2 : 0.6, 3).dump();
  }
  std::ofstream(dir / "bundle.json") << json{{"kind", "breath"}, {"members", {"m0.json", "m1.json"}}}.dump();
  const auto bundle = LoadTreeBundle((dir / "bundle.json").string());
  CHECK(bundle.kind == BranchKind::kBreath);
  CHECK(BaggedPredict(bundle, std::vector<double>(3)) == doctest::Approx(0.4));
  CHECK(KindOf([&] { LoadTreeBundle((dir / "bundle.json").string(), true); }) ==
        ErrorKind::kConfig);
  CHECK(KindOf([&] { LoadTreeBundle((dir / "missing.json").string()); }) == ErrorKind::kLoad);
}

TEST_CASE("external model handles") {
  const ExternalModelHandle h("stub", TensorShape{1, 128, 512},
                              std::make_shared<ConstantBackend>(0.7));
  CHECK(RunExternalModel(h, Blank(128, 512)) == 0.7);
  CHECK(KindOf([&] { RunExternalModel(h, Blank(128, 511)); }) == ErrorKind::kContract);
  const auto unloaded = ExternalModelHandle::Unloaded("gone", TensorShape{1, 128, 512});
  CHECK(KindOf([&] { RunExternalModel(unloaded, Blank(128, 512)); }) == ErrorKind::kLoad);

  const ExternalModelHandle out_of_range("wild", TensorShape{1, 2, 2},
                                         std::make_shared<ConstantBackend>(1.5));
  CHECK(KindOf([&] { RunExternalModel(out_of_range, Blank(2, 2)); }) == ErrorKind::kContract);

  const ExternalModelHandle failing(
      "boom", TensorShape{1, 2, 2},
      std::make_shared<FunctionBackend>(
          [](const dsp::MelSpectrogram&) -> double { throw std::runtime_error("bad"); }));
  try {
    RunExternalModel(failing, Blank(2, 2));
    FAIL("failure swallowed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kRuntime);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }

  const ExternalModelHandle sig("s", TensorShape{1, 2, 2},
                                std::make_shared<ConstantBackend>(0.0),
                                OutputActivation::kSigmoid);
  CHECK(RunExternalModel(sig, Blank(2, 2)) == 0.5);
}

TEST_CASE("external models load from json artifacts") {
  const auto dir = testing::TempDir("external");
  std::ofstream(dir / "c.json") << R"({"format": "constant", "probability": 0.3})";
  std::ofstream(dir / "p.json")
      << R"({"format": "pooled-linear", "weights": [1.0, -1.0], "bias": 0.5, "activation": "sigmoid"})";
  std::ofstream(dir / "x.json") << R"({"format": "mystery"})";
  const TensorShape shape{1, 2, 3};
  CHECK(RunExternalModel(LoadExternalModel("c", (dir / "c.json").string(), shape),
                         Blank(2, 3)) == 0.3);
  auto spec = Blank(2, 3);
  for (std::size_t c = 0; c < 3; ++c) {
    spec.values(0, c) = 1.0;
    spec.values(1, c) = 2.0;
  }
  const double expect = 1.0 / (1.0 + std::exp(-(0.5 + 1.0 - 2.0)));
  CHECK(RunExternalModel(LoadExternalModel("p", (dir / "p.json").string(), shape), spec) ==
        doctest::Approx(expect));
  CHECK(KindOf([&] { LoadExternalModel("x", (dir / "x.json").string(), shape); }) ==
        ErrorKind::kLoad);
  CHECK(KindOf([&] { LoadExternalModel("n", (dir / "none.json").string(), shape); }) ==
        ErrorKind::kLoad);
}

TEST_CASE("logistic prediction") {
  LogisticModel zero;
  CHECK(PredictLogistic(zero, SymptomBitmap{}) == 0.5);
  LogisticModel fever;
  fever.weights[*SymptomIndex("fever")] = 2.0;
  fever.bias = -1.0;
  SymptomBitmap s{};
  s[*SymptomIndex("fever")] = true;
  CHECK(PredictLogistic(fever, s) == doctest::Approx(0.7310585786));
  const std::array<bool, 8> short_bits{};
  CHECK(KindOf([&] { PredictLogistic(fever, std::span<const bool>(short_bits)); }) ==
        ErrorKind::kContract);
  CHECK(LoadLogisticModel(SaveLogisticModel(fever)).weights == fever.weights);
}

TEST_CASE("logistic training") {
  std::vector<SymptomRecord> separable;
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.5);
  const std::size_t cough = *SymptomIndex("cough");
  for (int i = 0; i < 64; ++i) {
    SymptomRecord r;
    for (auto&& b : r.symptoms) b = coin(rng);
    r.label = r.symptoms[cough];
    separable.push_back(r);
  }
  LogisticTrainingOptions options;
  options.record_loss = true;
  options.max_iterations = 5000;
  const auto fit = TrainLogistic(separable, options);
  for (const auto& r : separable) {
    CHECK((PredictLogistic(fit.model, r.symptoms) >= 0.5) == r.label);
  }
  for (std::size_t i = 1; i < fit.loss_history.size(); ++i) {
    CHECK(fit.loss_history[i] <= fit.loss_history[i - 1] + 1e-15);
  }

  options.max_iterations = 0;
  const auto none = TrainLogistic(separable, options);
  CHECK(PredictLogistic(none.model, separable[0].symptoms) == 0.5);

  std::vector<SymptomRecord> symmetric;
  for (int mask = 0; mask < 16; ++mask) {
    for (bool label : {false, true}) {
      SymptomRecord r;
      for (int b = 0; b < 4; ++b) r.symptoms[b] = (mask >> b) & 1;
      r.label = label;
      symmetric.push_back(r);
    }
  }
  const auto flat = TrainLogistic(symmetric);
  for (const auto& r : symmetric) {
    CHECK(std::abs(PredictLogistic(flat.model, r.symptoms) - 0.5) <= 1e-6);
  }

  std::vector<SymptomRecord> one_class(3);
  CHECK(KindOf([&] { TrainLogistic(one_class); }) == ErrorKind::kDegenerateInput);
}

}  // namespace
}  // namespace coughscreen::inference
