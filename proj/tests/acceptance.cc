// Copyright 2026 The CodeConcept Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance driver: runs every linked unit/property test, then prints one
// PASS/FAIL line per acceptance criterion. A criterion passes only when every
// test mapped to it ran and passed (and, for the smoke run, the pipeline
// finished within its time budget with all artifacts present).

#include <gtest/gtest.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"

namespace {

namespace fs = std::filesystem;

struct Criterion {
  std::string name;
  std::vector<std::string> suites;  // "Suite" or "Suite.Test"
};

const std::vector<Criterion>& Criteria() {
  static const std::vector<Criterion> kCriteria = {
      {"K-Means",
       {"KMeans.FourGaussianBlobs", "KMeans.SseNeverIncreasesOnRandomData",
        "KMeans.HandExampleMatchesExhaustiveOptimum", "KMeans.KEqualsNGivesZeroObjective",
        "KMeans.BestOfRestartsReachesExhaustiveOptimum", "KMeans.RejectsBadInput"}},
      {"K-Means determinism", {"KMeans.ThreadCountDoesNotChangeResult"}},
      {"Alignment oracle", {"AlignCluster", "Coverage", "AlignmentReport"}},
      {"Lexical detectors", {"Lexical"}},
      {"CSI", {"Jaccard", "MatchClusterings", "MaxWeightAssignment", "StabilityReportJson"}},
      {"Perturbations",
       {"PerturbSweep", "Renaming", "Validator", "NoOpInjection", "StatementReordering",
        "CanonicalSubstitution", "Perturb", "StubActivations"}},
      {"Concept classifier",
       {"ConceptClassifier", "SoftmaxObjective", "TrainConceptClassifier"}},
      {"Top-P selection", {"SelectSalient"}},
      {"Annotation",
       {"ParseAnnotation", "RequestAnnotation", "FleissKappa", "Prompt", "RequestBody",
        "NormalizeTags", "AnnotateClusters"}},
      {"Formats", {"Activations", "Attributions", "CorrespondenceJsonl"}},
  };
  return kCriteria;
}

bool Matches(const std::string& pattern, const std::string& suite, const std::string& test) {
  return pattern == suite || pattern == suite + "." + test;
}

// Records pass/fail per test and prints failing assertions tersely.
class Recorder : public ::testing::EmptyTestEventListener {
 public:
  void OnTestPartResult(const ::testing::TestPartResult& result) override {
    if (result.failed()) {
      std::cerr << (result.file_name() ? result.file_name() : "?") << ":"
                << result.line_number() << ": " << result.summary() << "\n";
    }
  }
  void OnTestEnd(const ::testing::TestInfo& info) override {
    results_[{info.test_suite_name(), info.name()}] = info.result()->Passed();
    if (!info.result()->Passed()) {
      std::cerr << "FAILED " << info.test_suite_name() << "." << info.name() << "\n";
    }
  }
  const std::map<std::pair<std::string, std::string>, bool>& results() const {
    return results_;
  }

 private:
  std::map<std::pair<std::string, std::string>, bool> results_;
};

int Cli(const std::vector<std::string>& args, std::string* err) {
  std::vector<const char*> argv = {"codeconcept"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream errs;
  const int code =
      codeconcept::RunCli(static_cast<int>(argv.size()), argv.data(), out, errs);
  *err += errs.str();
  return code;
}

// tokenize -> stub activations -> discover (k=20) -> align -> perturb
// (NoOpStatementInjection) -> csi -> report on the bundled corpus.
bool SmokeRun(double* seconds, std::string* detail) {
  const fs::path dir = fs::temp_directory_path() / "codeconcept_acceptance_smoke";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string corpus = std::string(CODECONCEPT_SOURCE_DIR) + "/data/demo_corpus";
  auto p = [&](const std::string& leaf) { return (dir / leaf).string(); };
  const std::vector<std::vector<std::string>> steps = {
      {"tokenize", "--corpus", corpus, "--out", p("tokens.jsonl"), "--vocab",
       p("vocab.json")},
      {"stub-activations", "--tokens", p("tokens.jsonl"), "--out", p("act")},
      {"discover", "--activations", p("act"), "--k", "20", "--out", p("clusters.json")},
      {"align", "--clusters", p("clusters.json"), "--tags", p("tokens.jsonl"), "--vocab",
       p("vocab.json"), "--out", p("align")},
      {"perturb", "--corpus", corpus, "--kind", "NoOpStatementInjection", "--out",
       p("noop_corpus"), "--map", p("noop_maps.jsonl")},
      {"tokenize", "--corpus", p("noop_corpus"), "--out", p("noop_tokens.jsonl")},
      {"stub-activations", "--tokens", p("noop_tokens.jsonl"), "--out", p("noop_act"),
       "--transfer-from", p("act"), "--map", p("noop_maps.jsonl")},
      {"discover", "--activations", p("noop_act"), "--k", "20", "--out",
       p("noop_clusters.json")},
      {"csi", "--before", p("clusters.json"), "--after", p("noop_clusters.json"), "--map",
       p("noop_maps.jsonl"), "--label", "NoOpStatementInjection", "--out",
       p("csi_noop.json")},
      {"report", "--clusters", p("clusters.json"), "--tokens", p("tokens.jsonl"),
       "--alignment", p("align"), "--csi", p("csi_noop.json"), "--out", p("report.md")},
  };
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  for (const auto& step : steps) {
    std::string err;
    if (Cli(step, &err) != 0) {
      *detail = step[0] + " failed: " + err;
      ok = false;
      break;
    }
  }
  *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (ok) {
    for (const char* artifact :
         {"tokens.jsonl", "vocab.json", "act/manifest.json", "act/matrix.f32",
          "act/tokens.jsonl", "clusters.json", "align/alignment.csv", "align/alignment.md",
          "align/lexical.csv", "align/lexical.md", "align/alignment.json",
          "noop_maps.jsonl", "csi_noop.json", "report.md"}) {
      if (!fs::exists(dir / artifact) || fs::file_size(dir / artifact) == 0) {
        *detail = std::string("missing artifact ") + artifact;
        ok = false;
        break;
      }
    }
  }
  if (ok && *seconds >= 60.0) {
    *detail = "exceeded 60 s";
    ok = false;
  }
  fs::remove_all(dir);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  spdlog::set_level(spdlog::level::warn);
  auto& listeners = ::testing::UnitTest::GetInstance()->listeners();
  delete listeners.Release(listeners.default_result_printer());
  auto* recorder = new Recorder;
  listeners.Append(recorder);
  (void)RUN_ALL_TESTS();

  bool all = true;
  for (const Criterion& c : Criteria()) {
    size_t ran = 0;
    size_t failed = 0;
    for (const auto& [key, passed] : recorder->results()) {
      for (const auto& pattern : c.suites) {
        if (Matches(pattern, key.first, key.second)) {
          ++ran;
          failed += !passed;
          break;
        }
      }
    }
    const bool pass = ran > 0 && failed == 0;
    all = all && pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << c.name << " (" << ran - failed << "/"
              << ran << " checks)\n";
  }

  // Tests outside every criterion (tokenizer, corpus loading, ...) still gate
  // the exit status.
  for (const auto& [key, passed] : recorder->results()) {
    if (!passed) all = false;
  }

  double seconds = 0;
  std::string detail;
  bool smoke = SmokeRun(&seconds, &detail);
  for (const auto& [key, passed] : recorder->results()) {
    if (key.first == "CliTest") smoke = smoke && passed;
  }
  all = all && smoke;
  std::ostringstream timing;
  timing.precision(2);
  timing << std::fixed << seconds;
  std::cout << (smoke ? "PASS" : "FAIL") << "  End-to-end smoke (" << timing.str()
            << " s, limit 60 s)" << (detail.empty() ? "" : ": " + detail) << "\n";
  return all ? 0 : 1;
}
