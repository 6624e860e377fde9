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

#ifndef CODECONCEPT_SYNTAX_TREE_H_
#define CODECONCEPT_SYNTAX_TREE_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <tree_sitter/api.h>

#include "codeconcept/language.h"

namespace codeconcept {

// Thin value wrapper over a tree-sitter node. Valid only while the owning
// SyntaxTree is alive.
class Node {
 public:
  Node() = default;
  explicit Node(TSNode node) : node_(node) {}

  bool IsNull() const { return ts_node_is_null(node_); }
  std::string_view Kind() const { return ts_node_type(node_); }
  bool IsNamed() const { return ts_node_is_named(node_); }
  bool IsMissing() const { return ts_node_is_missing(node_); }
  bool IsError() const { return ts_node_is_error(node_); }
  bool HasError() const { return ts_node_has_error(node_); }
  uint32_t StartByte() const { return ts_node_start_byte(node_); }
  uint32_t EndByte() const { return ts_node_end_byte(node_); }

  uint32_t ChildCount() const { return ts_node_child_count(node_); }
  Node Child(uint32_t i) const { return Node(ts_node_child(node_, i)); }
  uint32_t NamedChildCount() const { return ts_node_named_child_count(node_); }
  Node NamedChild(uint32_t i) const {
    return Node(ts_node_named_child(node_, i));
  }
  Node Field(std::string_view name) const {
    return Node(ts_node_child_by_field_name(
        node_, name.data(), static_cast<uint32_t>(name.size())));
  }
  // Field name under which child `i` hangs off this node, or empty.
  std::string_view FieldOfChild(uint32_t i) const {
    const char* name = ts_node_field_name_for_child(node_, i);
    return name == nullptr ? std::string_view() : std::string_view(name);
  }
  Node Parent() const { return Node(ts_node_parent(node_)); }

  std::vector<Node> Children() const;
  std::vector<Node> NamedChildren() const;

  bool operator==(const Node& other) const {
    return ts_node_eq(node_, other.node_);
  }

  TSNode raw() const { return node_; }

 private:
  TSNode node_{};
};

// Owns a parsed tree together with a copy of its source text.
class SyntaxTree {
 public:
  SyntaxTree(Language language, std::string source);

  Node Root() const { return Node(ts_tree_root_node(tree_.get())); }
  Language language() const { return language_; }
  const std::string& source() const { return source_; }
  std::string_view Text(const Node& node) const {
    return std::string_view(source_).substr(
        node.StartByte(), node.EndByte() - node.StartByte());
  }

  // Byte spans of ERROR and MISSING nodes, in source order.
  std::vector<std::pair<uint32_t, uint32_t>> ErrorSpans() const;

 private:
  struct TreeDeleter {
    void operator()(TSTree* tree) const { ts_tree_delete(tree); }
  };

  Language language_;
  std::string source_;
  std::unique_ptr<TSTree, TreeDeleter> tree_;
};

// Grammar for a language; throws UnsupportedError when none is linked in.
const TSLanguage* GrammarFor(Language language);

// Named token kinds the grammar can emit as leaves.
std::vector<std::string> DeclaredTokenKinds(Language language);

// Pre-order visit of every node under `root` (inclusive).
template <typename Fn>
void VisitPreorder(const Node& root, Fn&& fn) {
  std::vector<Node> stack{root};
  while (!stack.empty()) {
    Node node = stack.back();
    stack.pop_back();
    fn(node);
    for (uint32_t i = node.ChildCount(); i > 0; --i) {
      stack.push_back(node.Child(i - 1));
    }
  }
}

}  // namespace codeconcept

#endif  // CODECONCEPT_SYNTAX_TREE_H_
