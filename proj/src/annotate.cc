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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

std::string Join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint SplitEndpoint(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    throw ConfigError("endpoint must be an http(s) URL: " + url);
  }
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

bool Retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

std::vector<FewShotExample> DefaultFewShotExamples() {
  return {
      {{"returnBuffer", "concatBuffer"},
       {"returnBuffer.append(minParam);",
        "returnBuffer.append(FieldMetaData.Decimal.SQ_CLOSE);",
        "StringBuffer concatBuffer = new StringBuffer();",
        "concatBuffer.append(toAdd);"},
       "Buffer Manipulation",
       {"StringBuilder", "StringBuffer", "Data Aggregation",
        "String Concatenation"},
       "The tokens represent `StringBuilder` and `StringBuffer` objects used "
       "for building strings by appending data elements in sequence."},
      {{"."},
       {"returnBuffer.append(FieldMetaData.Decimal.SQ_CLOSE);",
        "jsonObject.getLong(Form.JSONMapping.FORM_TYPE_ID);", "date.getTime();",
        "fileReader.readLine();"},
       "Method Invocation Operator",
       {"Dot Notation", "Method Call", "Property Access"},
       "The dot (.) operator is used to call methods or access properties of "
       "objects in Java."},
  };
}

ContextSelection SelectContexts(
    const std::vector<std::pair<std::string, std::string>>& token_sentences,
    size_t cap) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::string>> by_token;
  std::set<std::string> all;
  for (const auto& [token, sentence] : token_sentences) {
    auto [it, inserted] = by_token.try_emplace(token);
    if (inserted) order.push_back(token);
    if (std::find(it->second.begin(), it->second.end(), sentence) ==
        it->second.end()) {
      it->second.push_back(sentence);
    }
    all.insert(sentence);
  }
  ContextSelection selection;
  selection.available = all.size();
  std::set<std::string> taken;
  for (size_t round = 0; selection.sentences.size() < cap; ++round) {
    bool any = false;
    for (const auto& token : order) {
      const auto& sentences = by_token[token];
      if (round >= sentences.size()) continue;
      any = true;
      if (selection.sentences.size() >= cap) break;
      if (taken.insert(sentences[round]).second) {
        selection.sentences.push_back(sentences[round]);
      }
    }
    if (!any) break;
  }
  return selection;
}

std::string BuildAnnotationPrompt(const std::vector<std::string>& tokens,
                                  const std::vector<std::string>& contexts,
                                  const PromptOptions& options,
                                  size_t available_contexts) {
  if (tokens.empty()) throw DataError("cannot annotate an empty cluster");
  std::ostringstream p;
  p << "You are analyzing a cluster of " << options.language
    << " tokens and their context sentences. Each cluster has one or more "
       "unique tokens. Your task is to identify the role or function these "
       "tokens play within the context of the provided sentences. Focus on "
       "understanding what the tokens are achieving in the code and their "
       "syntactic or semantic significance.\n\n";
  p << "**Guidelines for Analysis:**\n"
       "1. **Tokens:** Review the provided tokens.\n"
       "2. **Context Sentences:** Examine the context sentences to understand "
       "the usage of the tokens.\n"
       "3. **Role Identification:** Determine the role the tokens play in the "
       "context sentences, including their syntactic and semantic "
       "significance.\n"
       "4. **Concise Label:** Choose a descriptive label that accurately "
       "describes the function or role of the tokens in the code. Use "
       "specific terminology where applicable (e.g., `Buffer Manipulation`, "
       "`Method Invocation`, `Parameter Handling`).\n"
       "5. **Semantic Tags:** Include 3-5 relevant semantic tags that describe "
       "what is being achieved in the context sentences.\n"
       "6. **Description:** Provide a concise description (1-2 sentences) "
       "explaining the role of the tokens in the code.\n"
       "7. ' ( ' would have label 'Opening Parenthesis' and ')' would have "
       "label 'Closing Parenthesis'\n\n";
  if (!options.few_shot.empty()) {
    p << "### Examples from Previous Clusters:\n";
    for (size_t i = 0; i < options.few_shot.size(); ++i) {
      const auto& ex = options.few_shot[i];
      p << i + 1 << ". **Tokens:** `" << Join(ex.tokens, ", ") << "`  \n"
        << "   **Context Sentences:**\n";
      for (const auto& c : ex.contexts) p << "   - " << c << "\n";
      p << "   \n"
        << "   **Label:** " << ex.label << "  \n"
        << "   **Semantic Tags:** " << Join(ex.semantic_tags, ", ") << "  \n"
        << "   **Description:** " << ex.description << "\n\n";
    }
  }
  p << "Based on the provided tokens and context sentences below, analyze the "
       "cluster and provide your response in the following JSON format:\n\n"
       "{\n"
       "    \"Label\": \"Your concise label here\",\n"
       "    \"Semantic_Tags\": [\n"
       "        \"Tag1\",\n"
       "        \"Tag2\",\n"
       "        \"Tag3\",\n"
       "        \"Tag4\",\n"
       "        \"Tag5\"\n"
       "    ],\n"
       "    \"Description\": \"Your description here.\"\n"
       "}\n\n";

  std::vector<std::string> shown_tokens = tokens;
  if (shown_tokens.size() > options.max_tokens) {
    shown_tokens.resize(options.max_tokens);
  }
  p << "Tokens: " << Join(shown_tokens, ", ") << "\n";
  if (shown_tokens.size() < tokens.size()) {
    p << "(showing " << shown_tokens.size() << " of " << tokens.size()
      << " tokens)\n";
  }

  p << "All Context Sentences:\n";
  const size_t shown = std::min(contexts.size(), options.max_contexts);
  if (shown == 0) {
    p << "(no contexts)\n";
  } else {
    for (size_t i = 0; i < shown; ++i) {
      p << i + 1 << ". " << contexts[i] << "\n";
    }
  }
  const size_t available = std::max(available_contexts, contexts.size());
  if (available > shown && shown > 0) {
    p << "(showing " << shown << " of " << available
      << " context sentences)\n";
  }
  p << "\nEnsure your response is in valid JSON format and includes only the "
       "JSON object.\n";
  return p.str();
}

void LlmConfig::Validate() const {
  if (endpoint.empty()) throw ConfigError("LLM endpoint is required");
  SplitEndpoint(endpoint);
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw ConfigError("temperature must be in [0, 2]");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
  if (top_k < 0) throw ConfigError("top_k must be non-negative");
  if (max_retries < 0) throw ConfigError("max retries must be non-negative");
  if (max_in_flight < 1) throw ConfigError("max in-flight must be positive");
}

std::string BuildRequestBody(const std::string& prompt,
                             const LlmConfig& config) {
  nlohmann::ordered_json body;
  if (!config.model.empty()) body["model"] = config.model;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = config.temperature;
  body["top_p"] = config.top_p;
  if (config.supports_top_k) {
    body["top_k"] = config.top_k;
  }
  return body.dump();
}

std::string ExtractCompletion(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("LLM response is not JSON: ") + e.what());
  }
  try {
    if (j.contains("choices")) {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    }
    if (j.contains("candidates")) {
      return j.at("candidates")
          .at(0)
          .at("content")
          .at("parts")
          .at(0)
          .at("text")
          .get<std::string>();
    }
    if (j.contains("content") && j["content"].is_string()) {
      return j["content"].get<std::string>();
    }
    if (j.contains("text") && j["text"].is_string()) {
      return j["text"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("unexpected LLM response shape: ") + e.what());
  }
  throw ParseError("LLM response carries no completion text");
}

std::string RequestAnnotation(const std::string& prompt,
                              const LlmConfig& config, int cluster_id) {
  config.Validate();
  if (!config.supports_top_k) {
    spdlog::warn("provider does not accept top_k; dropping top_k={}",
                 config.top_k);
  }
  const Endpoint endpoint = SplitEndpoint(config.endpoint);
  httplib::Client client(endpoint.origin);
  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      config.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (!config.auth_env.empty()) {
    const char* key = std::getenv(config.auth_env.c_str());
    if (key == nullptr) {
      throw ConfigError("environment variable " + config.auth_env +
                        " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = BuildRequestBody(prompt, config);

  std::chrono::milliseconds backoff = config.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    spdlog::info("cluster {}: request attempt {} to {}", cluster_id,
                 attempt + 1, config.endpoint);
    auto response =
        client.Post(endpoint.path, headers, body, "application/json");
    const bool last = attempt >= config.max_retries;
    if (!response) {
      spdlog::warn("cluster {}: transport error: {}", cluster_id,
                   httplib::to_string(response.error()));
      if (last) {
        throw TransportError("LLM request for cluster " +
                             std::to_string(cluster_id) + " failed after " +
                             std::to_string(attempt + 1) + " attempt(s): " +
                             httplib::to_string(response.error()));
      }
    } else if (response->status >= 200 && response->status < 300) {
      spdlog::info("cluster {}: status {} ({} bytes)", cluster_id,
                   response->status, response->body.size());
      return ExtractCompletion(response->body);
    } else {
      spdlog::warn("cluster {}: status {}", cluster_id, response->status);
      if (last || !Retryable(response->status)) {
        throw ApiError(response->status,
                       "LLM endpoint returned status " +
                           std::to_string(response->status) + " for cluster " +
                           std::to_string(cluster_id));
      }
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

ConceptAnnotation ParseAnnotation(const std::string& raw, int cluster_id,
                                  const std::string& model_id) {
  std::string text = Trim(raw);
  if (text.starts_with("```")) {
    const auto newline = text.find('\n');
    text = newline == std::string::npos ? "" : text.substr(newline + 1);
    const auto fence = text.rfind("```");
    if (fence != std::string::npos) text = text.substr(0, fence);
    text = Trim(text);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("annotation for cluster " + std::to_string(cluster_id) +
                     " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw SchemaError("annotation must be a JSON object");

  auto require_string = [&](const char* field) {
    if (!j.contains(field)) {
      throw SchemaError(std::string("missing field: ") + field);
    }
    if (!j[field].is_string()) {
      throw SchemaError(std::string("field ") + field + " must be a string");
    }
    return j[field].get<std::string>();
  };

  ConceptAnnotation annotation;
  annotation.cluster_id = cluster_id;
  annotation.model_id = model_id;
  annotation.raw_response = raw;
  annotation.label = require_string("Label");
  if (Trim(annotation.label).empty()) {
    throw SchemaError("field Label must be non-empty");
  }
  if (!j.contains("Semantic_Tags")) {
    throw SchemaError("missing field: Semantic_Tags");
  }
  const auto& tags = j["Semantic_Tags"];
  if (!tags.is_array()) throw SchemaError("field Semantic_Tags must be a list");
  for (const auto& tag : tags) {
    if (!tag.is_string()) {
      throw SchemaError("field Semantic_Tags must hold strings");
    }
    annotation.semantic_tags.push_back(tag.get<std::string>());
  }
  if (annotation.semantic_tags.size() < kMinSemanticTags ||
      annotation.semantic_tags.size() > kMaxSemanticTags) {
    throw SchemaError("field Semantic_Tags must hold 3-5 tags, got " +
                      std::to_string(annotation.semantic_tags.size()));
  }
  annotation.description = require_string("Description");
  return annotation;
}

std::string AnnotationResponseJson(const ConceptAnnotation& annotation) {
  nlohmann::ordered_json j;
  j["Label"] = annotation.label;
  j["Semantic_Tags"] = annotation.semantic_tags;
  j["Description"] = annotation.description;
  return j.dump(4);
}

AnnotationBatch AnnotateClusters(
    const std::vector<AnnotationJob>& jobs, const LlmConfig& config,
    const std::function<std::string(const AnnotationJob&)>& request) {
  std::function<std::string(const AnnotationJob&)> fetch = request;
  if (!fetch) {
    fetch = [&config](const AnnotationJob& job) {
      return RequestAnnotation(job.prompt, config, job.cluster_id);
    };
  }
  std::map<int, ConceptAnnotation> done;
  AnnotationBatch batch;
  std::mutex sink;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      try {
        auto annotation =
            ParseAnnotation(fetch(job), job.cluster_id, config.model);
        std::lock_guard lock(sink);
        done.emplace(job.cluster_id, std::move(annotation));
      } catch (const std::exception& e) {
        std::lock_guard lock(sink);
        batch.errors.emplace(job.cluster_id, e.what());
      }
    }
  };
  const int threads =
      std::max(1, std::min<int>(config.max_in_flight,
                                static_cast<int>(jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& [id, annotation] : done) {
    batch.annotations.push_back(std::move(annotation));
  }
  return batch;
}

void WriteAnnotationsJsonl(std::ostream& out,
                           const std::vector<ConceptAnnotation>& annotations) {
  for (const auto& a : annotations) {
    nlohmann::ordered_json j;
    j["cluster_id"] = a.cluster_id;
    j["label"] = a.label;
    j["semantic_tags"] = a.semantic_tags;
    j["description"] = a.description;
    j["model_id"] = a.model_id;
    j["raw_response"] = a.raw_response;
    out << j.dump() << '\n';
  }
}

std::vector<ConceptAnnotation> ReadAnnotationsJsonl(std::istream& in) {
  std::vector<ConceptAnnotation> out;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ConceptAnnotation a;
      a.cluster_id = j.at("cluster_id").get<int>();
      a.label = j.at("label").get<std::string>();
      a.semantic_tags = j.at("semantic_tags").get<std::vector<std::string>>();
      a.description = j.at("description").get<std::string>();
      a.model_id = j.value("model_id", "");
      a.raw_response = j.value("raw_response", "");
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed annotation line: ") + e.what());
    }
  }
  return out;
}

TagNormalization NormalizeTags(
    const std::vector<ConceptAnnotation>& annotations,
    const std::map<std::string, std::string>& synonyms,
    const std::set<std::string>& canonical) {
  TagNormalization result;
  std::map<std::string, size_t> counts;
  for (const auto& annotation : annotations) {
    ConceptAnnotation mapped = annotation;
    for (auto& tag : mapped.semantic_tags) {
      auto it = synonyms.find(tag);
      if (it != synonyms.end()) tag = it->second;
    }
    const std::set<std::string> distinct(mapped.semantic_tags.begin(),
                                         mapped.semantic_tags.end());
    for (const auto& tag : distinct) ++counts[tag];

    std::string role = kUnclearRole;
    for (const auto& tag : mapped.semantic_tags) {
      if (canonical.empty() || canonical.contains(tag)) {
        role = tag;
        break;
      }
    }
    result.roles[mapped.cluster_id] = role;
    result.annotations.push_back(std::move(mapped));
  }
  result.frequencies.assign(counts.begin(), counts.end());
  std::stable_sort(result.frequencies.begin(), result.frequencies.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [tag, count] : result.frequencies) {
    if (count >= 2 && !canonical.empty() && !canonical.contains(tag)) {
      result.candidates.emplace_back(tag, count);
    }
  }
  return result;
}

std::map<std::string, std::string> ReadSynonymTsv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read synonym map " + path.string());
  std::map<std::string, std::string> map;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line.starts_with("#")) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("synonym map line " + std::to_string(line_no) +
                        " needs two tab-separated columns");
    }
    map[Trim(line.substr(0, tab))] = Trim(line.substr(tab + 1));
  }
  return map;
}

std::set<std::string> ReadTagList(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read tag list " + path.string());
  std::set<std::string> tags;
  std::string line;
  while (std::getline(in, line)) {
    std::string tag = Trim(line);
    if (tag.empty() || tag.starts_with("#")) continue;
    tags.insert(std::move(tag));
  }
  return tags;
}

double FleissKappa(const RatingMatrix& matrix) {
  const auto& counts = matrix.counts;
  const size_t items = counts.size();
  if (items < 2) throw DataError("Fleiss' kappa needs at least 2 items");
  const size_t categories = counts.front().size();
  if (categories < 2) {
    throw DataError("Fleiss' kappa needs at least 2 categories");
  }
  long raters = -1;
  for (const auto& row : counts) {
    if (row.size() != categories) {
      throw DataError("rating matrix rows have unequal category counts");
    }
    long sum = 0;
    for (int c : row) {
      if (c < 0) throw DataError("rating counts must be non-negative");
      sum += c;
    }
    if (raters < 0) raters = sum;
    if (sum != raters) {
      throw DataError("every item must be rated by the same number of raters");
    }
  }
  if (raters < 2) throw DataError("Fleiss' kappa needs at least 2 raters");

  const double n = static_cast<double>(raters);
  const double total = static_cast<double>(items) * n;
  double p_bar = 0.0;
  std::vector<double> column(categories, 0.0);
  for (const auto& row : counts) {
    double squares = 0.0;
    for (size_t j = 0; j < categories; ++j) {
      squares += static_cast<double>(row[j]) * row[j];
      column[j] += row[j];
    }
    p_bar += (squares - n) / (n * (n - 1.0));
  }
  p_bar /= static_cast<double>(items);
  double p_e = 0.0;
  for (double c : column) p_e += (c / total) * (c / total);
  if (std::abs(1.0 - p_e) < 1e-15) {
    if (std::abs(1.0 - p_bar) < 1e-15) return 1.0;
    throw DataError("degenerate margins");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

}  // namespace codeconcept
