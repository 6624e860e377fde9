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

#include "codeconcept/corpus.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "codeconcept/errors.h"
#include "codeconcept/syntax_tree.h"

namespace codeconcept {
namespace {

namespace fs = std::filesystem;

bool IsValidUtf8(std::string_view text) {
  size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    size_t len = 0;
    uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > text.size()) return false;
    for (size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

// Literal node kinds emitted as one token even though the grammar splits
// them into quote and fragment leaves.
bool IsAtomicKind(Language language, std::string_view kind) {
  switch (language) {
    case Language::kJava:
      return kind == "string_literal" || kind == "character_literal";
    case Language::kC:
      return kind == "string_literal" || kind == "char_literal";
  }
  return false;
}

bool IsBlank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  });
}

std::string DescribeErrors(
    const Snippet& snippet,
    const std::vector<std::pair<uint32_t, uint32_t>>& spans) {
  std::ostringstream msg;
  msg << "parse error in " << snippet.id << " at byte span(s)";
  for (const auto& [start, end] : spans) {
    msg << " [" << start << "," << end << ")";
  }
  return msg.str();
}

}  // namespace

const Snippet* Corpus::Find(std::string_view id) const {
  auto it = std::lower_bound(
      snippets.begin(), snippets.end(), id,
      [](const Snippet& s, std::string_view key) { return s.id < key; });
  if (it == snippets.end() || it->id != id) return nullptr;
  return &*it;
}

const std::string& SyntacticLabeling::TagOf(const InstanceId& id) const {
  auto it = tags.find(id);
  if (it == tags.end()) {
    throw DataError("unlabeled token instance " + id.snippet_id + "#" +
                    std::to_string(id.token_idx));
  }
  return it->second;
}

Corpus LoadCorpus(const fs::path& path,
                  const std::optional<std::set<Language>>& language_filter) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw DataError("corpus path does not exist: " + path.string());
  }
  std::vector<std::pair<std::string, fs::path>> files;
  if (fs::is_regular_file(path)) {
    files.emplace_back(path.filename().generic_string(), path);
  } else {
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      files.emplace_back(
          fs::relative(entry.path(), path).generic_string(), entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  for (const auto& [id, file] : files) {
    auto language = LanguageFromExtension(file.extension().string());
    if (!language) {
      corpus.warnings.push_back("skipped " + id + ": unsupported extension");
      continue;
    }
    if (language_filter && !language_filter->contains(*language)) continue;
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      corpus.warnings.push_back("skipped " + id + ": unreadable");
      continue;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string source = buffer.str();
    if (!IsValidUtf8(source)) {
      corpus.warnings.push_back("skipped " + id + ": not valid UTF-8");
      continue;
    }
    corpus.snippets.push_back({id, *language, std::move(source)});
  }
  if (corpus.snippets.empty()) {
    throw DataError("empty corpus: no snippets loaded from " + path.string());
  }
  return corpus;
}

std::vector<TaggedToken> TokenizeTagged(const Snippet& snippet) {
  SyntaxTree tree(snippet.language, snippet.source);
  if (auto spans = tree.ErrorSpans(); !spans.empty()) {
    throw SyntaxError(DescribeErrors(snippet, spans));
  }

  std::vector<TaggedToken> out;
  struct Frame {
    Node node;
    std::string_view named_ancestor;
  };
  std::vector<Frame> stack{{tree.Root(), tree.Root().Kind()}};
  while (!stack.empty()) {
    auto [node, ancestor] = stack.back();
    stack.pop_back();
    const bool atomic = node.IsNamed() && IsAtomicKind(snippet.language,
                                                       node.Kind());
    if (node.ChildCount() == 0 || atomic) {
      if (node.EndByte() == node.StartByte()) continue;
      std::string_view text = tree.Text(node);
      if (IsBlank(text)) continue;
      TaggedToken tagged;
      tagged.token.snippet_id = snippet.id;
      tagged.token.token_idx = static_cast<int32_t>(out.size());
      tagged.token.text = std::string(text);
      tagged.token.start_byte = node.StartByte();
      tagged.token.end_byte = node.EndByte();
      tagged.tag = std::string(node.IsNamed() ? node.Kind() : ancestor);
      out.push_back(std::move(tagged));
      continue;
    }
    std::string_view next = node.IsNamed() ? node.Kind() : ancestor;
    for (uint32_t i = node.ChildCount(); i > 0; --i) {
      stack.push_back({node.Child(i - 1), next});
    }
  }
  return out;
}

std::vector<TokenInstance> Tokenize(const Snippet& snippet) {
  std::vector<TokenInstance> out;
  for (auto& tagged : TokenizeTagged(snippet)) {
    out.push_back(std::move(tagged.token));
  }
  return out;
}

std::vector<std::vector<TaggedToken>> TokenizeCorpus(const Corpus& corpus,
                                                     int num_threads) {
  const size_t n = corpus.snippets.size();
  std::vector<std::vector<TaggedToken>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        results[i] = TokenizeTagged(corpus.snippets[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, num_threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return results;
}

SyntacticLabeling SyntacticTags(const Corpus& corpus) {
  SyntacticLabeling labeling;
  std::set<Language> languages;
  for (const auto& snippet : corpus.snippets) {
    languages.insert(snippet.language);
    for (auto& tagged : TokenizeTagged(snippet)) {
      labeling.tag_vocabulary.insert(tagged.tag);
      labeling.tags.emplace(tagged.token.id(), std::move(tagged.tag));
    }
  }
  for (Language language : languages) {
    for (auto& kind : DeclaredTokenKinds(language)) {
      labeling.tag_vocabulary.insert(std::move(kind));
    }
  }
  return labeling;
}

std::string Reconstruct(std::string_view source,
                        const std::vector<TokenInstance>& tokens) {
  std::string out;
  out.reserve(source.size());
  uint32_t cursor = 0;
  for (const auto& token : tokens) {
    out.append(source.substr(cursor, token.start_byte - cursor));
    out.append(token.text);
    cursor = token.end_byte;
  }
  out.append(source.substr(cursor));
  return out;
}

void WriteTokensJsonl(std::ostream& out,
                      const std::vector<std::vector<TaggedToken>>& tokens) {
  for (const auto& snippet_tokens : tokens) {
    for (const auto& tagged : snippet_tokens) {
      nlohmann::ordered_json record;
      record["snippet_id"] = tagged.token.snippet_id;
      record["token_idx"] = tagged.token.token_idx;
      record["text"] = tagged.token.text;
      record["start_byte"] = tagged.token.start_byte;
      record["end_byte"] = tagged.token.end_byte;
      record["tag"] = tagged.tag;
      out << record.dump() << '\n';
    }
  }
}

std::vector<TaggedToken> ReadTokensJsonl(std::istream& in) {
  std::vector<TaggedToken> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      TaggedToken tagged;
      tagged.token.snippet_id = record.at("snippet_id").get<std::string>();
      tagged.token.token_idx = record.at("token_idx").get<int32_t>();
      tagged.token.text = record.at("text").get<std::string>();
      tagged.token.start_byte = record.at("start_byte").get<uint32_t>();
      tagged.token.end_byte = record.at("end_byte").get<uint32_t>();
      tagged.tag = record.at("tag").get<std::string>();
      out.push_back(std::move(tagged));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("tokens line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return out;
}

SyntacticLabeling LabelingFromTokens(const std::vector<TaggedToken>& tokens,
                                     const std::set<std::string>& vocabulary) {
  SyntacticLabeling labeling;
  labeling.tag_vocabulary = vocabulary;
  for (const auto& tagged : tokens) {
    labeling.tags.emplace(tagged.token.id(), tagged.tag);
    labeling.tag_vocabulary.insert(tagged.tag);
  }
  return labeling;
}

}  // namespace codeconcept
