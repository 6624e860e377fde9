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

#include "cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace codeconcept {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome Cli(std::initializer_list<std::string> args) {
  std::vector<const char*> argv = {"codeconcept"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("codeconcept_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    corpus_ = std::string(CODECONCEPT_SOURCE_DIR) + "/data/demo_corpus";
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string P(const std::string& name) { return (dir_ / name).string(); }

  // tokenize -> stub activations -> discover for the corpus at `corpus`.
  static void Pipeline(const std::string& corpus, const std::string& prefix,
                       const std::string& transfer_from = "",
                       const std::string& map = "") {
    ASSERT_EQ(Cli({"tokenize", "--corpus", corpus, "--out", P(prefix + "tok.jsonl"),
                   "--vocab", P(prefix + "vocab.json")})
                  .code,
              0);
    if (transfer_from.empty()) {
      ASSERT_EQ(Cli({"stub-activations", "--tokens", P(prefix + "tok.jsonl"), "--out",
                     P(prefix + "act"), "--dim", "16"})
                    .code,
                0);
    } else {
      ASSERT_EQ(Cli({"stub-activations", "--tokens", P(prefix + "tok.jsonl"), "--out",
                     P(prefix + "act"), "--dim", "16", "--transfer-from", transfer_from,
                     "--map", map})
                    .code,
                0);
    }
    const Outcome d = Cli({"discover", "--activations", P(prefix + "act"), "--k", "12",
                           "--out", P(prefix + "clusters.json")});
    ASSERT_EQ(d.code, 0) << d.err;
  }

  static fs::path dir_;
  static std::string corpus_;
};

fs::path CliTest::dir_;
std::string CliTest::corpus_;

TEST_F(CliTest, MissingSubcommandIsUsageError) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
}

TEST_F(CliTest, UnknownPerturbationKindIsConfigError) {
  const Outcome o = Cli({"perturb", "--corpus", corpus_, "--kind", "Shuffle", "--out",
                         P("bad_pert"), "--map", P("bad_map.jsonl")});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("NoOpStatementInjection"), std::string::npos) << o.err;
}

TEST_F(CliTest, MissingInputIsConfigError) {
  EXPECT_EQ(Cli({"tokenize", "--corpus", P("does_not_exist"), "--out", P("x.jsonl")}).code,
            2);
  EXPECT_EQ(Cli({"discover", "--activations", corpus_, "--k", "0", "--out", P("c.json")})
                .code,
            2);
}

TEST_F(CliTest, AnnotateWithoutEndpointIsConfigError) {
  Pipeline(corpus_, "ann_");
  const Outcome o = Cli({"annotate", "--clusters", P("ann_clusters.json"), "--tokens",
                         P("ann_tok.jsonl"), "--corpus", corpus_, "--out",
                         P("ann.jsonl")});
  EXPECT_EQ(o.code, 2);
  const Outcome dry =
      Cli({"annotate", "--clusters", P("ann_clusters.json"), "--tokens",
           P("ann_tok.jsonl"), "--corpus", corpus_, "--out", P("ann.jsonl"),
           "--prompts-out", P("prompts.jsonl"), "--dry-run"});
  EXPECT_EQ(dry.code, 0) << dry.err;
  EXPECT_NE(Slurp(P("prompts.jsonl")).find("Tokens: "), std::string::npos);
}

TEST_F(CliTest, EndToEndIsByteIdenticalAndReportHasAllTables) {
  Pipeline(corpus_, "a_");
  const std::vector<std::string> artifacts = {"a_tok.jsonl", "a_vocab.json",
                                              "a_act/manifest.json", "a_act/matrix.f32",
                                              "a_clusters.json"};
  std::vector<std::string> first;
  for (const auto& name : artifacts) first.push_back(Slurp(P(name)));
  Pipeline(corpus_, "a_");
  for (size_t i = 0; i < artifacts.size(); ++i) {
    EXPECT_FALSE(first[i].empty()) << artifacts[i];
    EXPECT_TRUE(first[i] == Slurp(P(artifacts[i]))) << artifacts[i] << " differs on rerun";
  }

  const Outcome align = Cli({"align", "--clusters", P("a_clusters.json"), "--tags",
                             P("a_tok.jsonl"), "--vocab", P("a_vocab.json"), "--out",
                             P("align")});
  ASSERT_EQ(align.code, 0) << align.err;
  EXPECT_TRUE(fs::exists(P("align/alignment.csv")));

  const Outcome pert = Cli({"perturb", "--corpus", corpus_, "--kind",
                            "NoOpStatementInjection", "--out", P("noop"), "--map",
                            P("noop_maps.jsonl")});
  ASSERT_EQ(pert.code, 0) << pert.err;
  Pipeline(P("noop"), "n_", P("a_act"), P("noop_maps.jsonl"));
  const Outcome csi = Cli({"csi", "--before", P("a_clusters.json"), "--after",
                           P("n_clusters.json"), "--map", P("noop_maps.jsonl"),
                           "--label", "NoOpStatementInjection", "--out", P("csi.json")});
  ASSERT_EQ(csi.code, 0) << csi.err;

  const Outcome report =
      Cli({"report", "--clusters", P("a_clusters.json"), "--tokens", P("a_tok.jsonl"),
           "--alignment", P("align"), "--csi", P("csi.json"), "--out", P("report.md")});
  ASSERT_EQ(report.code, 0) << report.err;
  const std::string md = Slurp(P("report.md"));
  EXPECT_NE(md.find("| 85% | 90% | 95% |"), std::string::npos);
  EXPECT_NE(md.find("Lexical"), std::string::npos);
  EXPECT_NE(md.find("| Perturbation | Average Jaccard | CSI |"), std::string::npos);
  EXPECT_NE(md.find("NoOpStatementInjection"), std::string::npos);

  // Clusterings of different corpora without a map: strict failure naming a
  // snippet.
  const Outcome nomap = Cli({"csi", "--before", P("a_clusters.json"), "--after",
                             P("n_clusters.json"), "--out", P("csi_nomap.json")});
  EXPECT_EQ(nomap.code, 1);
  EXPECT_NE(nomap.err.find(".java"), std::string::npos) << nomap.err;
}

TEST_F(CliTest, PerturbRefusesToOverwriteCorpus) {
  const Outcome o = Cli({"perturb", "--corpus", corpus_, "--kind",
                         "NoOpStatementInjection", "--out", corpus_, "--map",
                         P("m.jsonl")});
  EXPECT_EQ(o.code, 2);
}

TEST_F(CliTest, CorruptActivationsAreDataErrors) {
  fs::create_directories(P("corrupt"));
  Pipeline(corpus_, "c_");
  fs::copy(P("c_act"), P("corrupt"),
           fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  fs::resize_file(P("corrupt/matrix.f32"), 10);
  const Outcome o =
      Cli({"discover", "--activations", P("corrupt"), "--k", "3", "--out", P("cc.json")});
  EXPECT_EQ(o.code, 1);
  EXPECT_FALSE(o.err.empty());
}

}  // namespace
}  // namespace codeconcept
