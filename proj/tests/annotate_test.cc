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

#include "codeconcept/annotate.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <functional>
#include <random>
#include <thread>

#include "codeconcept/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace codeconcept {
namespace {

const char kBufferExample[] =
    R"({"Label":"Buffer Manipulation","Semantic_Tags":["StringBuilder","StringBuffer","Data Aggregation","String Concatenation"],"Description":"The tokens represent StringBuilder and StringBuffer objects used for building strings by appending data elements in sequence."})";

TEST(ParseAnnotation, BufferManipulationExample) {
  const ConceptAnnotation a = ParseAnnotation(kBufferExample, 4, "m");
  EXPECT_EQ(a.cluster_id, 4);
  EXPECT_EQ(a.label, "Buffer Manipulation");
  EXPECT_EQ(a.semantic_tags,
            (std::vector<std::string>{"StringBuilder", "StringBuffer",
                                      "Data Aggregation", "String Concatenation"}));
  EXPECT_EQ(a.description,
            "The tokens represent StringBuilder and StringBuffer objects used for "
            "building strings by appending data elements in sequence.");
  EXPECT_EQ(a.model_id, "m");
  EXPECT_EQ(a.raw_response, kBufferExample);
}

TEST(ParseAnnotation, CodeFencesAreStripped) {
  const auto plain = ParseAnnotation(kBufferExample, 1);
  const auto fenced =
      ParseAnnotation(std::string("```json\n") + kBufferExample + "\n```\n", 1);
  EXPECT_EQ(fenced.label, plain.label);
  EXPECT_EQ(fenced.semantic_tags, plain.semantic_tags);
  EXPECT_EQ(fenced.description, plain.description);
}

std::string SchemaMessage(const std::string& raw) {
  try {
    ParseAnnotation(raw, 0);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "<no SchemaError>";
}

TEST(ParseAnnotation, SchemaViolations) {
  EXPECT_NE(SchemaMessage(R"({"Label":"X","Semantic_Tags":["a","b"],"Description":"d"})")
                .find("Semantic_Tags"),
            std::string::npos);
  EXPECT_NE(SchemaMessage(
                R"({"Label":"X","Semantic_Tags":["a","b","c","d","e","f"],"Description":"d"})")
                .find("Semantic_Tags"),
            std::string::npos);
  EXPECT_NE(SchemaMessage(R"({"Label":"X","Semantic_Tags":["a","b","c"]})")
                .find("Description"),
            std::string::npos);
  EXPECT_NE(SchemaMessage(R"({"Label":"","Semantic_Tags":["a","b","c"],"Description":"d"})")
                .find("Label"),
            std::string::npos);
  EXPECT_THROW(ParseAnnotation("not json at all", 0), ParseError);
}

TEST(ParseAnnotation, SerializeThenParseIsIdentity) {
  ConceptAnnotation a;
  a.cluster_id = 12;
  a.label = "Loop \"Control\"";
  a.semantic_tags = {"for", "while", "Iteration", "Control Flow", "Loop"};
  a.description = "Line one.\nLine two.";
  const std::string raw = AnnotationResponseJson(a);
  ConceptAnnotation back = ParseAnnotation(raw, 12);
  EXPECT_EQ(back.label, a.label);
  EXPECT_EQ(back.semantic_tags, a.semantic_tags);
  EXPECT_EQ(back.description, a.description);
}

TEST(Prompt, ContainsExemplarsTokensAndNumberedContexts) {
  const std::vector<std::string> contexts = {
      "returnBuffer.append(x);", "concatBuffer.append(y);",
      "returnBuffer.toString();", "concatBuffer.setLength(0);"};
  const std::string prompt =
      BuildAnnotationPrompt({"returnBuffer", "concatBuffer"}, contexts);
  EXPECT_NE(prompt.find("You are analyzing a cluster"), std::string::npos);
  EXPECT_NE(prompt.find("Buffer Manipulation"), std::string::npos);
  EXPECT_NE(prompt.find("Method Invocation Operator"), std::string::npos);
  EXPECT_NE(prompt.find("Tokens: returnBuffer, concatBuffer"), std::string::npos);
  for (size_t i = 0; i < contexts.size(); ++i) {
    EXPECT_NE(prompt.find(std::to_string(i + 1) + ". " + contexts[i]), std::string::npos);
  }
  EXPECT_EQ(prompt.find("(no contexts)"), std::string::npos);
  EXPECT_EQ(prompt, BuildAnnotationPrompt({"returnBuffer", "concatBuffer"}, contexts));
}

TEST(Prompt, NoContexts) {
  EXPECT_NE(BuildAnnotationPrompt({"x"}, {}).find("(no contexts)"), std::string::npos);
}

TEST(Prompt, EmptyClusterIsAnError) {
  EXPECT_THROW(BuildAnnotationPrompt({}, {"a"}), DataError);
}

TEST(Prompt, OversizeClusterIsCappedWithNote) {
  std::vector<std::pair<std::string, std::string>> token_sentences;
  for (int i = 0; i < 10000; ++i) {
    token_sentences.emplace_back("t" + std::to_string(i % 7),
                                 "line " + std::to_string(i) + ";");
  }
  const ContextSelection selection = SelectContexts(token_sentences, 12);
  ASSERT_EQ(selection.sentences.size(), 12u);
  EXPECT_EQ(selection.available, 10000u);
  // First occurrence per distinct token, then round-robin.
  EXPECT_EQ(selection.sentences[0], "line 0;");
  EXPECT_EQ(selection.sentences[6], "line 6;");
  EXPECT_EQ(selection.sentences[7], "line 7;");
  const std::string prompt =
      BuildAnnotationPrompt({"t0"}, selection.sentences, {}, selection.available);
  EXPECT_NE(prompt.find("12. "), std::string::npos);
  EXPECT_EQ(prompt.find("13. "), std::string::npos);
  EXPECT_NE(prompt.find("(showing 12 of 10000 context sentences)"), std::string::npos);
}

TEST(RequestBody, TopKOnlyWhenSupported) {
  LlmConfig config;
  config.endpoint = "http://localhost/v1";
  const auto with = nlohmann::json::parse(BuildRequestBody("hi", config));
  EXPECT_EQ(with.at("temperature").get<double>(), 0.2);
  EXPECT_EQ(with.at("top_p").get<double>(), 0.4);
  EXPECT_EQ(with.at("top_k").get<int>(), 8);
  config.supports_top_k = false;
  EXPECT_FALSE(nlohmann::json::parse(BuildRequestBody("hi", config)).contains("top_k"));
}

TEST(LlmConfig, RangesAreValidated) {
  LlmConfig config;
  config.endpoint = "http://localhost/v1";
  EXPECT_NO_THROW(config.Validate());
  config.temperature = 2.5;
  EXPECT_THROW(config.Validate(), ConfigError);
  config.temperature = 0.2;
  config.max_retries = -1;
  EXPECT_THROW(config.Validate(), ConfigError);
}

// Chat-completion mock whose status sequence is scripted per request.
class MockServer {
 public:
  explicit MockServer(std::function<int(int)> status_for_attempt)
      : status_for_attempt_(std::move(status_for_attempt)) {
    server_.Post("/v1/chat", [this](const httplib::Request& req, httplib::Response& res) {
      const int attempt = requests_++;
      last_auth_ = req.get_header_value("Authorization");
      const int status = status_for_attempt_(attempt);
      res.status = status;
      if (status == 200) {
        nlohmann::json body;
        body["choices"] = {{{"message", {{"content", kBufferExample}}}}};
        res.set_content(body.dump(), "application/json");
      } else {
        res.set_content("{\"error\":\"scripted\"}", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  LlmConfig Config() const {
    LlmConfig config;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat";
    config.initial_backoff = std::chrono::milliseconds(1);
    config.timeout = std::chrono::milliseconds(5000);
    return config;
  }
  int requests() const { return requests_; }
  const std::string& last_auth() const { return last_auth_; }

 private:
  std::function<int(int)> status_for_attempt_;
  httplib::Server server_;
  std::thread thread_;
  std::atomic<int> requests_{0};
  std::string last_auth_;
  int port_ = 0;
};

TEST(RequestAnnotation, ValidResponse) {
  MockServer server([](int) { return 200; });
  ::setenv("ANNOTATE_TEST_KEY", "secret", 1);
  LlmConfig config = server.Config();
  config.auth_env = "ANNOTATE_TEST_KEY";
  EXPECT_EQ(RequestAnnotation("prompt", config, 3), kBufferExample);
  EXPECT_EQ(server.requests(), 1);
  EXPECT_EQ(server.last_auth(), "Bearer secret");
}

TEST(RequestAnnotation, RetriesTooManyRequests) {
  MockServer server([](int attempt) { return attempt < 2 ? 429 : 200; });
  EXPECT_EQ(RequestAnnotation("prompt", server.Config(), 3), kBufferExample);
  EXPECT_EQ(server.requests(), 3);
}

TEST(RequestAnnotation, PersistentServerErrorIsApiError) {
  MockServer server([](int) { return 500; });
  LlmConfig config = server.Config();
  config.max_retries = 1;
  try {
    RequestAnnotation("prompt", config, 3);
    FAIL() << "expected ApiError";
  } catch (const ApiError& e) {
    EXPECT_EQ(e.status(), 500);
  }
  EXPECT_EQ(server.requests(), 2);
}

TEST(RequestAnnotation, UnreachableEndpointIsTransportError) {
  LlmConfig config;
  config.endpoint = "http://127.0.0.1:1/v1/chat";
  config.max_retries = 0;
  config.timeout = std::chrono::milliseconds(500);
  EXPECT_THROW(RequestAnnotation("prompt", config), TransportError);
}

TEST(RequestAnnotation, MissingAuthVariableIsConfigError) {
  LlmConfig config;
  config.endpoint = "http://127.0.0.1:1/v1/chat";
  config.auth_env = "ANNOTATE_TEST_SURELY_UNSET";
  EXPECT_THROW(RequestAnnotation("prompt", config), ConfigError);
}

TEST(AnnotateClusters, ResultsDoNotDependOnOrder) {
  std::vector<AnnotationJob> jobs;
  for (int id = 0; id < 20; ++id) jobs.push_back({id, "prompt " + std::to_string(id)});
  auto fake = [](const AnnotationJob& job) -> std::string {
    if (job.cluster_id == 13) return "not json";
    return R"({"Label":"L)" + std::to_string(job.cluster_id) +
           R"(","Semantic_Tags":["a","b","c"],"Description":"d"})";
  };
  LlmConfig config;
  config.endpoint = "http://unused/";
  config.max_in_flight = 4;
  const AnnotationBatch forward = AnnotateClusters(jobs, config, fake);
  std::reverse(jobs.begin(), jobs.end());
  const AnnotationBatch backward = AnnotateClusters(jobs, config, fake);
  EXPECT_EQ(forward.annotations, backward.annotations);
  ASSERT_EQ(forward.annotations.size(), 19u);
  EXPECT_EQ(forward.annotations[0].label, "L0");
  ASSERT_EQ(forward.errors.size(), 1u);
  EXPECT_TRUE(forward.errors.contains(13));
}

ConceptAnnotation Annotation(int id, std::vector<std::string> tags) {
  ConceptAnnotation a;
  a.cluster_id = id;
  a.label = "L";
  a.semantic_tags = std::move(tags);
  a.description = "d";
  return a;
}

TEST(NormalizeTags, EmptyMapIsIdentity) {
  const std::vector<ConceptAnnotation> in = {Annotation(0, {"a", "b", "c"}),
                                             Annotation(1, {"a", "d", "e"})};
  const TagNormalization out = NormalizeTags(in, {});
  EXPECT_EQ(out.annotations, in);
  EXPECT_EQ(out.frequencies[0], (std::pair<std::string, size_t>{"a", 2}));
  EXPECT_EQ(out.frequencies.size(), 5u);
}

TEST(NormalizeTags, SynonymsMergeCounts) {
  const std::vector<ConceptAnnotation> in = {
      Annotation(0, {"String Concatenation", "x", "y"}),
      Annotation(1, {"String Manipulation", "x", "z"}),
      Annotation(2, {"String Concatenation", "w", "z"})};
  const TagNormalization out = NormalizeTags(
      in, {{"String Concatenation", "String Manipulation"}},
      {"String Manipulation", "x"});
  ASSERT_FALSE(out.frequencies.empty());
  EXPECT_EQ(out.frequencies[0], (std::pair<std::string, size_t>{"String Manipulation", 3}));
  EXPECT_EQ(out.annotations[0].semantic_tags[0], "String Manipulation");
  // "z" occurs twice outside the canonical set.
  EXPECT_EQ(out.candidates, (std::vector<std::pair<std::string, size_t>>{{"z", 2}}));
}

TEST(NormalizeTags, NoCanonicalRoleKeepsReservedTag) {
  const TagNormalization out =
      NormalizeTags({Annotation(5, {"p", "q", "r"}), Annotation(6, {"q", "Loop", "r"})},
                    {}, {"Loop"});
  EXPECT_EQ(out.roles.at(5), kUnclearRole);
  EXPECT_EQ(out.roles.at(6), "Loop");
}

TEST(NormalizeTags, BundledSynonymsTargetCanonicalTags) {
  const std::string data = std::string(CODECONCEPT_SOURCE_DIR) + "/data/";
  const auto canonical = ReadTagList(data + "canonical_tags.txt");
  const auto synonyms = ReadSynonymTsv(data + "synonyms.tsv");
  EXPECT_EQ(canonical.size(), 43u);
  EXPECT_TRUE(canonical.contains(kUnclearRole));
  ASSERT_FALSE(synonyms.empty());
  for (const auto& [raw, target] : synonyms) {
    EXPECT_TRUE(canonical.contains(target)) << raw << " -> " << target;
  }
}

TEST(FleissKappa, HandComputedFourByThree) {
  // P_i = 1, 1, 0, 1/3 -> P = 7/12; p_j = 4/12, 6/12, 2/12 -> Pe = 7/18.
  // kappa = (7/12 - 7/18) / (1 - 7/18) = 7/22.
  const RatingMatrix m{{{3, 0, 0}, {0, 3, 0}, {1, 1, 1}, {0, 2, 1}}};
  EXPECT_NEAR(FleissKappa(m), 7.0 / 22.0, 1e-9);
}

TEST(FleissKappa, PerfectAgreementIsOne) {
  EXPECT_DOUBLE_EQ(FleissKappa({{{3, 0}, {0, 3}, {3, 0}}}), 1.0);
  EXPECT_DOUBLE_EQ(FleissKappa({{{2, 0}, {2, 0}}}), 1.0);  // degenerate margins
}

TEST(FleissKappa, EvenSplitIsNegative) {
  // P = 0, Pe = 1/2 -> kappa = -1.
  EXPECT_NEAR(FleissKappa({{{1, 1}, {1, 1}, {1, 1}}}), -1.0, 1e-12);
}

TEST(FleissKappa, InvariantUnderRelabelingAndItemOrder) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    RatingMatrix m;
    for (int i = 0; i < 6; ++i) {
      std::vector<int> row(4, 0);
      for (int r = 0; r < 5; ++r) ++row[rng() % 4];
      m.counts.push_back(row);
    }
    RatingMatrix shuffled = m;
    std::shuffle(shuffled.counts.begin(), shuffled.counts.end(), rng);
    for (auto& row : shuffled.counts) std::reverse(row.begin(), row.end());
    EXPECT_NEAR(FleissKappa(m), FleissKappa(shuffled), 1e-12);
  }
}

TEST(FleissKappa, InvalidMatricesAreRejected) {
  EXPECT_THROW(FleissKappa({{{2, 1}}}), DataError);             // one item
  EXPECT_THROW(FleissKappa({{{2, 1}, {1, 1}}}), DataError);     // unequal raters
  EXPECT_THROW(FleissKappa({{{1, 0}, {0, 1}}}), DataError);      // one rater
  EXPECT_THROW(FleissKappa({{{3}, {3}}}), DataError);           // one category
}

}  // namespace
}  // namespace codeconcept
