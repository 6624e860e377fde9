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

#include "codeconcept/syntax_tree.h"

#include <set>

#include "codeconcept/errors.h"

// The grammar ABI header exposes token_count, which the public runtime API
// does not.
#include "tree_sitter/parser.h"

extern "C" const TSLanguage* tree_sitter_java();
extern "C" const TSLanguage* tree_sitter_c();

namespace codeconcept {

std::vector<Node> Node::Children() const {
  std::vector<Node> out;
  out.reserve(ChildCount());
  for (uint32_t i = 0; i < ChildCount(); ++i) out.push_back(Child(i));
  return out;
}

std::vector<Node> Node::NamedChildren() const {
  std::vector<Node> out;
  out.reserve(NamedChildCount());
  for (uint32_t i = 0; i < NamedChildCount(); ++i) {
    out.push_back(NamedChild(i));
  }
  return out;
}

const TSLanguage* GrammarFor(Language language) {
  switch (language) {
    case Language::kJava:
      return tree_sitter_java();
    case Language::kC:
      return tree_sitter_c();
  }
  throw UnsupportedError("no grammar linked for language");
}

std::vector<std::string> DeclaredTokenKinds(Language language) {
  const TSLanguage* grammar = GrammarFor(language);
  std::set<std::string> kinds;
  for (uint32_t sym = 1; sym < grammar->token_count; ++sym) {
    const auto symbol = static_cast<TSSymbol>(sym);
    if (ts_language_symbol_type(grammar, symbol) != TSSymbolTypeRegular) {
      continue;
    }
    kinds.insert(ts_language_symbol_name(grammar, symbol));
  }
  return {kinds.begin(), kinds.end()};
}

SyntaxTree::SyntaxTree(Language language, std::string source)
    : language_(language), source_(std::move(source)) {
  std::unique_ptr<TSParser, void (*)(TSParser*)> parser(ts_parser_new(),
                                                         ts_parser_delete);
  if (!ts_parser_set_language(parser.get(), GrammarFor(language))) {
    throw UnsupportedError("grammar ABI version mismatch");
  }
  tree_.reset(ts_parser_parse_string(parser.get(), nullptr, source_.data(),
                                     static_cast<uint32_t>(source_.size())));
  if (!tree_) throw SyntaxError("parser returned no tree");
}

std::vector<std::pair<uint32_t, uint32_t>> SyntaxTree::ErrorSpans() const {
  std::vector<std::pair<uint32_t, uint32_t>> spans;
  if (!Root().HasError()) return spans;
  std::vector<Node> stack{Root()};
  while (!stack.empty()) {
    Node node = stack.back();
    stack.pop_back();
    if (node.IsError() || node.IsMissing()) {
      spans.emplace_back(node.StartByte(), node.EndByte());
      continue;
    }
    if (!node.HasError()) continue;
    for (uint32_t i = node.ChildCount(); i > 0; --i) {
      stack.push_back(node.Child(i - 1));
    }
  }
  return spans;
}

}  // namespace codeconcept
