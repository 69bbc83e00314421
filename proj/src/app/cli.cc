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

#include "coughscreen/app/cli.h"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "coughscreen/app/config.h"
#include "coughscreen/app/registry.h"
#include "coughscreen/app/service.h"
#include "coughscreen/dsp/feature_dump.h"
#include "coughscreen/dsp/features.h"
#include "coughscreen/dsp/mel.h"
#include "coughscreen/error.h"
#include "coughscreen/evaluation/grid_search.h"
#include "coughscreen/evaluation/kfold.h"
#include "coughscreen/evaluation/report.h"
#include "coughscreen/sessions/analytics.h"
#include "coughscreen/sessions/manifest.h"
#include "coughscreen/evaluation/distribution.h"
#include "json.hpp"

namespace coughscreen::app {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorKind::kStorage, "cannot write " + path);
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kStorage, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json GateJson(const screening::GateDecision& g) {
  return {{"score", g.score},
          {"threshold", g.threshold},
          {"accepted", g.accepted},
          {"reason", g.reason}};
}

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

inference::SymptomBitmap ParseSymptomList(const std::string& csv) {
  inference::SymptomBitmap bits{};
  std::stringstream in(csv);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (name.empty()) continue;
    const auto idx = inference::SymptomIndex(name);
    if (!idx) throw Error(ErrorKind::kInvalidArgument, "unknown symptom '" + name + "'");
    bits[*idx] = true;
  }
  return bits;
}

// Branch score table: header "label,dcnn,gb,gb_breath,gb_voice" in any
// column order, one row per item.
evaluation::BranchScores ReadBranchScores(const std::string& path) {
  std::stringstream in(ReadText(path));
  std::string line;
  std::map<std::string, std::size_t> col;
  evaluation::BranchScores out;
  static const char* kCols[] = {"dcnn", "gb", "gb_breath", "gb_voice"};
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = sessions::SplitCsvLine(line);
    if (col.empty()) {
      for (std::size_t i = 0; i < f.size(); ++i) col[f[i]] = i;
      for (const char* c : {"label", "dcnn", "gb", "gb_breath", "gb_voice"}) {
        if (!col.count(c)) {
          throw Error(ErrorKind::kSchema, path + ": missing column '" + c + "'");
        }
      }
      continue;
    }
    try {
      const int label = std::stoi(f.at(col["label"]));
      for (std::size_t b = 0; b < 4; ++b) {
        out[b].scores.push_back(std::stod(f.at(col[kCols[b]])));
        out[b].labels.push_back(label);
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::kSchema, path + ":" + std::to_string(row) + ": bad row");
    }
  }
  return out;
}

// Precomputed scores: header "path,score".
std::map<std::string, double> ReadScoreTable(const std::string& path) {
  std::stringstream in(ReadText(path));
  std::string line;
  std::map<std::string, std::size_t> col;
  std::map<std::string, double> out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = sessions::SplitCsvLine(line);
    if (col.empty()) {
      for (std::size_t i = 0; i < f.size(); ++i) col[f[i]] = i;
      if (!col.count("path") || !col.count("score")) {
        throw Error(ErrorKind::kSchema, path + ": expected columns path,score");
      }
      continue;
    }
    try {
      out[f.at(col["path"])] = std::stod(f.at(col["score"]));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kSchema, path + ": bad score row");
    }
  }
  return out;
}

struct Options {
  std::uint64_t seed = 0;

  std::string clip;
  std::string out_prefix;
  std::string name;

  std::string detector;
  std::string config;
  double threshold = screening::kDefaultGateThreshold;

  std::string cough, breath, voice, symptoms, weights;

  std::string manifest;
  std::size_t k = 10;
  std::string scores;
  std::string branch = "stack";
  double mcc_threshold = 0.5;
  std::string report_out;
  std::string roc_out;

  std::string grid_input;
  double step = evaluation::kDefaultGridStep;
  std::string metric = "auc";
  std::size_t threads = 0;

  std::string log;
  std::string from, to;
  std::size_t bins = 10;

  std::string host;
  int port = -1;
};

int CmdFeatures(const Options& o, std::ostream& out) {
  const audio::AudioClip canonical = audio::Canonicalize(audio::LoadClipFile(o.clip));
  const dsp::LogMelFrameProvider provider;
  const dsp::GammatoneConfig cfg;
  const dsp::FeatureVector fv = dsp::ExtractFeatureVector(canonical, provider, cfg);
  Matrix m(1, fv.values.size());
  std::copy(fv.values.begin(), fv.values.end(), m.row(0).begin());
  dsp::DumpMetadata meta;
  meta.name = o.name.empty() ? fs::path(o.clip).stem().string() : o.name;
  meta.sample_rate = canonical.sample_rate;
  meta.config_hash = dsp::FeatureConfigHash(cfg, provider.name());
  const std::string prefix =
      o.out_prefix.empty() ? fs::path(o.clip).replace_extension("").string() + ".features"
                           : o.out_prefix;
  dsp::WriteFeatureDump(prefix, m, meta);
  out << json{{"clip", o.clip},
              {"dump", prefix},
              {"length", fv.values.size()},
              {"config_hash", meta.config_hash}}
             .dump(2)
      << "\n";
  return kExitOk;
}

int CmdDetect(const Options& o, std::ostream& out) {
  inference::ExternalModelHandle detector =
      inference::ExternalModelHandle::Unloaded("detector", inference::DetectorInputShape());
  double threshold = o.threshold;
  if (!o.config.empty()) {
    const ServiceConfig c = LoadServiceConfig(o.config);
    detector = inference::LoadExternalModel("detector", c.models.detector,
                                            inference::DetectorInputShape());
    threshold = c.gate_threshold;
  }
  if (!o.detector.empty()) {
    detector = inference::LoadExternalModel("detector", o.detector,
                                            inference::DetectorInputShape());
  }
  const audio::AudioClip clip = audio::LoadClipFile(o.clip);
  const auto gate = screening::GateRecording(clip, detector, threshold);
  const json doc = {{"clip", o.clip},
                    {"gate", GateJson(gate)},
                    {"decision", gate.accepted ? "accepted" : "rejected"}};
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int CmdScreen(const Options& o, std::ostream& out) {
  ServiceConfig c = LoadServiceConfig(o.config);
  if (!o.weights.empty()) {
    const auto preset = screening::StackingWeights::Preset(o.weights);
    if (!preset) throw Error(ErrorKind::kInvalidArgument, "unknown preset " + o.weights);
    c.weights = *preset;
  }
  const auto registry = BuildRegistry(c);
  screening::SessionInputs in;
  in.cough = audio::LoadClipFile(o.cough);
  if (!o.breath.empty()) in.breath = audio::LoadClipFile(o.breath);
  if (!o.voice.empty()) in.voice = audio::LoadClipFile(o.voice);
  if (!o.symptoms.empty()) in.symptoms = ParseSymptomList(o.symptoms);
  const auto result = screening::RunFullPipeline(in, *registry, PipelineOptionsFrom(c));
  json doc = {{"gate", GateJson(result.gate)}, {"retry_suggested", result.retry_suggested}};
  if (result.verdict) {
    doc["probability"] = result.verdict->probability;
    doc["band"] = std::string(screening::BandName(result.verdict->band));
    doc["disclaimer"] = result.verdict->disclaimer;
    doc["branches"] = {{"dcnn", OptionalNumber(result.branches.dcnn)},
                       {"gb", OptionalNumber(result.branches.gb)},
                       {"gb_breath", OptionalNumber(result.branches.gb_breath)},
                       {"gb_voice", OptionalNumber(result.branches.gb_voice)}};
    doc["audio_probability"] = OptionalNumber(result.audio_probability);
    doc["symptom_probability"] = OptionalNumber(result.symptom_probability);
  } else {
    doc["instructions"] = std::string(kRecordingInstructions);
  }
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int CmdEval(const Options& o, std::ostream& out) {
  const auto entries = sessions::LoadManifest(o.manifest);
  evaluation::LabeledScores data;
  if (!o.scores.empty()) {
    const auto table = ReadScoreTable(o.scores);
    for (const auto& e : entries) {
      auto it = table.find(e.path);
      if (it == table.end()) {
        throw Error(ErrorKind::kSchema, "no score for manifest path '" + e.path + "'");
      }
      data.scores.push_back(it->second);
      data.labels.push_back(e.label);
    }
  } else {
    if (o.config.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "eval needs --scores or --config");
    }
    const ServiceConfig c = LoadServiceConfig(o.config);
    const auto registry = BuildRegistry(c);
    const auto options = PipelineOptionsFrom(c);
    for (const auto& e : entries) {
      const audio::AudioClip clip =
          audio::LoadClipFile(sessions::ResolvePath(o.manifest, e.path));
      double p = 0.0;
      if (o.branch == "stack") {
        screening::SessionInputs in;
        in.cough = clip;
        p = *screening::EvaluateAccepted(in, *registry, options,
                                         screening::MakeGateDecision(1.0))
                 .final_probability;
      } else if (o.branch == "gb") {
        const auto fv = dsp::ExtractFeatureVector(audio::Canonicalize(clip),
                                                  *registry->embedding, registry->gammatone);
        p = inference::BaggedPredict(registry->gb_cough, fv.values);
      } else if (o.branch == "dcnn") {
        const auto mel = dsp::FitTimeAxis(
            dsp::ClassifierMelSpectrogram(audio::Canonicalize(clip)), dsp::kClassifierFrames);
        p = inference::BaggedPredict(registry->dcnn, mel);
      } else {
        throw Error(ErrorKind::kInvalidArgument, "branch must be stack, gb or dcnn");
      }
      data.scores.push_back(p);
      data.labels.push_back(e.label);
    }
  }
  std::vector<evaluation::FoldItem> items;
  for (const auto& e : entries) items.push_back({e.path, e.label, e.GroupKey()});
  const auto plan = evaluation::KFoldPlan(items, o.k, o.seed);
  const auto report = evaluation::EvaluateFolds(data, plan, o.mcc_threshold);
  json doc = json::parse(evaluation::ReportJson(report));
  doc["seed"] = o.seed;
  const std::string text = doc.dump(2);
  if (!o.report_out.empty()) WriteText(o.report_out, text + "\n");
  if (!o.roc_out.empty() && report.mean_roc) {
    WriteText(o.roc_out, evaluation::RocCurveCsv(*report.mean_roc));
  }
  out << text << "\n";
  return kExitOk;
}

int CmdGridSearch(const Options& o, std::ostream& out) {
  std::string path = o.grid_input;
  if (fs::is_directory(path)) path = (fs::path(path) / "branch_scores.csv").string();
  const auto branches = ReadBranchScores(path);
  evaluation::GridSearchOptions opts;
  opts.step = o.step;
  opts.threads = o.threads;
  opts.mcc_threshold = o.mcc_threshold;
  if (o.metric == "auc") {
    opts.metric = evaluation::GridMetric::kAuc;
  } else if (o.metric == "mcc") {
    opts.metric = evaluation::GridMetric::kMcc;
  } else {
    throw Error(ErrorKind::kInvalidArgument, "metric must be auc or mcc");
  }
  const auto r = evaluation::GridSearchWeights(branches, opts);
  out << json{{"weights",
               {{"t", r.weights.t}, {"x", r.weights.x}, {"y", r.weights.y}, {"z", r.weights.z}}},
              {"metric", std::string(evaluation::GridMetricName(opts.metric))},
              {"value", r.metric},
              {"step", o.step},
              {"points_evaluated", r.points_evaluated}}
             .dump(2)
      << "\n";
  return kExitOk;
}

int CmdAnalytics(const Options& o, std::ostream& out) {
  auto log = sessions::ReadSubmissionLog(o.log);
  sessions::TimestampMs from = std::numeric_limits<sessions::TimestampMs>::min();
  sessions::TimestampMs to = std::numeric_limits<sessions::TimestampMs>::max();
  if (!o.from.empty()) from = sessions::ParseTimestamp(o.from);
  if (!o.to.empty()) to = sessions::ParseTimestamp(o.to);
  if (from > to) throw Error(ErrorKind::kInvalidArgument, "--from is after --to");
  log = sessions::FilterWindow(log, from, to);
  const auto rr = sessions::RerecordingAnalysis(log);
  std::vector<double> scores;
  for (const auto& r : log) {
    if (r.gate) scores.push_back(r.gate->score);
  }
  const auto hist = evaluation::MakeProbabilityHistogram(scores, o.bins);
  out << json{{"records", log.size()},
              {"gated_count", rr.gated_count},
              {"rejected_count", rr.rejected_count},
              {"rejection_rate", rr.gated_count ? json(sessions::RejectionRate(log))
                                                : json(nullptr)},
              {"rerecording",
               {{"sequences", rr.sequences.size()},
                {"successful", rr.successful_count},
                {"rerecorded_count", rr.rerecorded_count},
                {"rerecorded_fraction", rr.rerecorded_fraction},
                {"success_fraction", rr.success_fraction}}},
              {"gate_score_histogram", {{"counts", hist.counts}, {"markers", hist.markers}}}}
             .dump(2)
      << "\n";
  return kExitOk;
}

int CmdServe(const Options& o) {
  ServiceConfig c = LoadServiceConfig(o.config);
  if (!o.host.empty()) c.host = o.host;
  if (o.port >= 0) c.port = o.port;
  return Serve(c);
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Respiratory-audio screening toolkit", "coughscreen"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "Seed for every randomized step")->capture_default_str();

  auto* features = app.add_subcommand("features", "Extract the feature vector of a clip");
  features->add_option("clip", o.clip, "Audio file")->required()->check(CLI::ExistingFile);
  features->add_option("--out", o.out_prefix, "Output prefix for .bin/.json");
  features->add_option("--name", o.name, "Name stored in the dump metadata");

  auto* detect = app.add_subcommand("detect", "Run the cough gate on a clip");
  detect->add_option("clip", o.clip, "Audio file")->required()->check(CLI::ExistingFile);
  detect->add_option("--detector", o.detector, "Detector model file");
  detect->add_option("--config", o.config, "Service config providing the detector");
  detect->add_option("--threshold", o.threshold, "Gate threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  auto* screen = app.add_subcommand("screen", "Screen a set of recordings");
  screen->add_option("--config", o.config, "Service config")->required()->check(CLI::ExistingFile);
  screen->add_option("--cough", o.cough, "Cough recording")->required()->check(CLI::ExistingFile);
  screen->add_option("--breath", o.breath, "Breath recording")->check(CLI::ExistingFile);
  screen->add_option("--voice", o.voice, "Voice recording")->check(CLI::ExistingFile);
  screen->add_option("--symptoms", o.symptoms, "Comma-separated symptom names");
  screen->add_option("--weights", o.weights, "Weight preset (variant1|variant2)");

  auto* eval = app.add_subcommand("eval", "k-fold metric report over a manifest");
  eval->add_option("manifest", o.manifest, "Manifest CSV or JSON")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--k", o.k, "Number of folds")->capture_default_str();
  eval->add_option("--scores", o.scores, "CSV of precomputed scores (path,score)");
  eval->add_option("--config", o.config, "Service config used to score clips");
  eval->add_option("--branch", o.branch, "stack, gb or dcnn")->capture_default_str();
  eval->add_option("--threshold", o.mcc_threshold, "Binarization threshold for MCC")
      ->capture_default_str();
  eval->add_option("--out", o.report_out, "Write the JSON report here");
  eval->add_option("--roc-csv", o.roc_out, "Write the mean ROC curve as CSV");

  auto* grid = app.add_subcommand("gridsearch", "Search stacking weights");
  grid->add_option("input", o.grid_input,
                   "branch_scores.csv or a directory containing it")
      ->required()
      ->check(CLI::ExistingPath);
  grid->add_option("--step", o.step, "Grid step (must divide 1)")->capture_default_str();
  grid->add_option("--metric", o.metric, "auc or mcc")->capture_default_str();
  grid->add_option("--threshold", o.mcc_threshold, "Binarization threshold for MCC")
      ->capture_default_str();
  grid->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* analytics = app.add_subcommand("analytics", "Rejection and re-recording report");
  analytics->add_option("log", o.log, "Submission log (NDJSON)")
      ->required()
      ->check(CLI::ExistingFile);
  analytics->add_option("--from", o.from, "Window start, UTC ISO-8601");
  analytics->add_option("--to", o.to, "Window end (exclusive)");
  analytics->add_option("--bins", o.bins, "Histogram bins")
      ->capture_default_str()
      ->check(CLI::Range(1, 1000));

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", o.config, "Service config")->required()->check(CLI::ExistingFile);
  serve->add_option("--host", o.host, "Override the listen host");
  serve->add_option("--port", o.port, "Override the listen port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (features->parsed()) return CmdFeatures(o, out);
    if (detect->parsed()) return CmdDetect(o, out);
    if (screen->parsed()) return CmdScreen(o, out);
    if (eval->parsed()) return CmdEval(o, out);
    if (grid->parsed()) return CmdGridSearch(o, out);
    if (analytics->parsed()) return CmdAnalytics(o, out);
    if (serve->parsed()) return CmdServe(o);
  } catch (const Error& e) {
    err << "error (" << ErrorKindName(e.kind()) << "): " << e.what() << "\n";
    return kExitOperational;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOperational;
  }
  return kExitUsage;
}

}  // namespace coughscreen::app
