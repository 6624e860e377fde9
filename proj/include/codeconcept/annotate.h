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

#ifndef CODECONCEPT_ANNOTATE_H_
#define CODECONCEPT_ANNOTATE_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace codeconcept {

struct FewShotExample {
  std::vector<std::string> tokens;
  std::vector<std::string> contexts;
  std::string label;
  std::vector<std::string> semantic_tags;
  std::string description;
};

// The two worked clusters the annotation prompt ships with: a buffer
// manipulation cluster and the method invocation dot operator.
std::vector<FewShotExample> DefaultFewShotExamples();

struct PromptOptions {
  std::string language = "Java";
  size_t max_contexts = 12;
  size_t max_tokens = 50;
  std::vector<FewShotExample> few_shot = DefaultFewShotExamples();
};

// Context sentences for one cluster, chosen deterministically: the first
// sentence of every distinct token (in order of first appearance), then
// round-robin over the remaining sentences of each token, up to `cap`.
struct ContextSelection {
  std::vector<std::string> sentences;
  size_t available = 0;  // distinct candidate sentences
};
ContextSelection SelectContexts(
    const std::vector<std::pair<std::string, std::string>>& token_sentences,
    size_t cap);

// Throws DataError when `tokens` is empty. `available_contexts`, when larger
// than the number of contexts shown, adds a truncation note.
std::string BuildAnnotationPrompt(const std::vector<std::string>& tokens,
                                  const std::vector<std::string>& contexts,
                                  const PromptOptions& options = {},
                                  size_t available_contexts = 0);

struct LlmConfig {
  std::string endpoint;             // http(s)://host[:port]/path
  std::string auth_env;             // environment variable holding the key
  std::string model;
  double temperature = 0.2;
  double top_p = 0.4;
  int top_k = 8;
  bool supports_top_k = true;
  int max_retries = 3;
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds initial_backoff{500};
  int max_in_flight = 4;

  // Throws ConfigError when a field is out of range.
  void Validate() const;
};

// Provider-neutral chat-completion request body for `prompt`.
std::string BuildRequestBody(const std::string& prompt, const LlmConfig& config);

// Completion text from a chat-completion style response body. Understands
// choices[0].message.content, candidates[0].content.parts[0].text and a
// top-level "content"/"text" string. Throws ParseError otherwise.
std::string ExtractCompletion(const std::string& body);

// One completion; 429 and 5xx responses and transport failures are retried
// with exponential backoff up to config.max_retries times. Throws
// TransportError or ApiError once retries are exhausted.
std::string RequestAnnotation(const std::string& prompt,
                              const LlmConfig& config, int cluster_id = -1);

struct ConceptAnnotation {
  int cluster_id = -1;
  std::string label;
  std::vector<std::string> semantic_tags;
  std::string description;
  std::string raw_response;
  std::string model_id;

  bool operator==(const ConceptAnnotation&) const = default;
};

inline constexpr size_t kMinSemanticTags = 3;
inline constexpr size_t kMaxSemanticTags = 5;

// Strips optional ``` fences and validates Label, Semantic_Tags (3-5) and
// Description. Throws ParseError or SchemaError.
ConceptAnnotation ParseAnnotation(const std::string& raw, int cluster_id,
                                  const std::string& model_id = "");

// The {"Label","Semantic_Tags","Description"} object for an annotation.
std::string AnnotationResponseJson(const ConceptAnnotation& annotation);

struct AnnotationJob {
  int cluster_id = -1;
  std::string prompt;
};

// Runs jobs with up to config.max_in_flight concurrent requests. Results are
// returned in cluster_id order regardless of completion order. Failures are
// reported per cluster in `errors`.
struct AnnotationBatch {
  std::vector<ConceptAnnotation> annotations;
  std::map<int, std::string> errors;
};
AnnotationBatch AnnotateClusters(
    const std::vector<AnnotationJob>& jobs, const LlmConfig& config,
    const std::function<std::string(const AnnotationJob&)>& request = {});

void WriteAnnotationsJsonl(std::ostream& out,
                           const std::vector<ConceptAnnotation>& annotations);
std::vector<ConceptAnnotation> ReadAnnotationsJsonl(std::istream& in);

inline constexpr char kUnclearRole[] = "Unclear Behavioral Role";

struct TagNormalization {
  std::vector<ConceptAnnotation> annotations;  // tags mapped to canonical
  // Tag frequencies (annotations carrying the tag), descending, ties by name.
  std::vector<std::pair<std::string, size_t>> frequencies;
  // Frequent tags (>= 2 annotations) outside the canonical set.
  std::vector<std::pair<std::string, size_t>> candidates;
  // Canonical role per cluster: first canonical tag, else kUnclearRole.
  std::map<int, std::string> roles;
};

// `canonical` may be empty, in which case every tag counts as canonical.
TagNormalization NormalizeTags(
    const std::vector<ConceptAnnotation>& annotations,
    const std::map<std::string, std::string>& synonyms,
    const std::set<std::string>& canonical = {});

// Two tab-separated columns per line: raw tag, canonical tag. '#' starts a
// comment line.
std::map<std::string, std::string> ReadSynonymTsv(
    const std::filesystem::path& path);
// One tag per line; '#' comments and blank lines ignored.
std::set<std::string> ReadTagList(const std::filesystem::path& path);

// items x categories counts; every row sums to the number of raters.
struct RatingMatrix {
  std::vector<std::vector<int>> counts;
};

// Fleiss' kappa. Throws DataError for fewer than 2 items, raters or
// categories, for unequal row sums, or for degenerate margins.
double FleissKappa(const RatingMatrix& matrix);

}  // namespace codeconcept

#endif  // CODECONCEPT_ANNOTATE_H_
