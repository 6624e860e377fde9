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

#ifndef CODECONCEPT_CORPUS_H_
#define CODECONCEPT_CORPUS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "codeconcept/language.h"

namespace codeconcept {

struct Snippet {
  std::string id;  // corpus-relative path, '/' separated
  Language language = Language::kJava;
  std::string source;
};

// Identity of one token occurrence. Clusters, labelings and perturbation
// correspondences are all keyed by it.
struct InstanceId {
  std::string snippet_id;
  int32_t token_idx = 0;

  auto operator<=>(const InstanceId&) const = default;
  bool operator==(const InstanceId&) const = default;
};

struct InstanceIdHash {
  size_t operator()(const InstanceId& id) const {
    return std::hash<std::string>()(id.snippet_id) * 1000003u ^
           std::hash<int32_t>()(id.token_idx);
  }
};

struct TokenInstance {
  std::string snippet_id;
  int32_t token_idx = 0;
  std::string text;
  uint32_t start_byte = 0;
  uint32_t end_byte = 0;  // exclusive

  InstanceId id() const { return {snippet_id, token_idx}; }
  bool operator==(const TokenInstance&) const = default;
};

struct TaggedToken {
  TokenInstance token;
  std::string tag;
  bool operator==(const TaggedToken&) const = default;
};

struct Corpus {
  std::vector<Snippet> snippets;  // sorted by id
  std::vector<std::string> warnings;

  const Snippet* Find(std::string_view id) const;
};

struct SyntacticLabeling {
  std::unordered_map<InstanceId, std::string, InstanceIdHash> tags;
  std::set<std::string> tag_vocabulary;

  // Throws DataError for an unlabeled instance.
  const std::string& TagOf(const InstanceId& id) const;
};

// Loads every file under `path` (recursively) whose extension maps to a
// supported language. A single regular file is also accepted. Files that are
// not valid UTF-8 or have unknown extensions are reported in
// Corpus::warnings. Throws DataError when nothing is loaded.
Corpus LoadCorpus(const std::filesystem::path& path,
                  const std::optional<std::set<Language>>& language_filter =
                      std::nullopt);

// Leaf tokens of the concrete syntax tree in source order. String and
// character literals are kept whole; comments are single tokens. Throws
// SyntaxError listing error spans when the snippet does not parse cleanly.
std::vector<TokenInstance> Tokenize(const Snippet& snippet);

// Tokenize plus the tag of each token: the node kind of a named leaf, or of
// the deepest named ancestor for anonymous leaves.
std::vector<TaggedToken> TokenizeTagged(const Snippet& snippet);

SyntacticLabeling SyntacticTags(const Corpus& corpus);

// Tokenizes every snippet of the corpus, in snippet order, using up to
// `num_threads` workers. Output order does not depend on the thread count.
std::vector<std::vector<TaggedToken>> TokenizeCorpus(const Corpus& corpus,
                                                     int num_threads = 1);

// Rebuilds the source from its tokens plus the original inter-token gaps.
std::string Reconstruct(std::string_view source,
                        const std::vector<TokenInstance>& tokens);

// One JSON object per line:
// {"snippet_id","token_idx","text","start_byte","end_byte","tag"}.
void WriteTokensJsonl(std::ostream& out,
                      const std::vector<std::vector<TaggedToken>>& tokens);
std::vector<TaggedToken> ReadTokensJsonl(std::istream& in);

// Labeling rebuilt from a tokens JSONL stream plus an explicit vocabulary.
SyntacticLabeling LabelingFromTokens(const std::vector<TaggedToken>& tokens,
                                     const std::set<std::string>& vocabulary);

}  // namespace codeconcept

#endif  // CODECONCEPT_CORPUS_H_
