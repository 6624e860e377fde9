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

#include "codeconcept/perturb.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "codeconcept/errors.h"
#include "codeconcept/syntax_tree.h"

namespace codeconcept {
namespace {

// ---------------------------------------------------------------------------
// Rewriting framework. A transform emits edits against the original source;
// each edit replaces [start, end) with a list of segments that either copy a
// range of the original (keeping token identity) or insert fresh text. An
// inserted segment may substitute exactly one original token, in which case
// the token starting `anchor` bytes into the text inherits its identity.

struct Segment {
  bool copy = false;
  uint32_t start = 0;  // copied range, or the substituted token
  uint32_t end = 0;
  std::string text;
  std::optional<uint32_t> anchor;
};

struct Edit {
  uint32_t start = 0;
  uint32_t end = 0;
  std::vector<Segment> segments;
};

Segment CopySeg(uint32_t start, uint32_t end) {
  return {true, start, end, {}, std::nullopt};
}
Segment InsertSeg(std::string text) {
  return {false, 0, 0, std::move(text), std::nullopt};
}
Segment SubstituteSeg(uint32_t start, uint32_t end, std::string text,
                      uint32_t anchor) {
  return {false, start, end, std::move(text), anchor};
}

Edit InsertAt(uint32_t pos, std::string text) {
  return {pos, pos, {InsertSeg(std::move(text))}};
}
Edit Substitute(uint32_t start, uint32_t end, std::string text,
                uint32_t anchor = 0) {
  return {start, end, {SubstituteSeg(start, end, std::move(text), anchor)}};
}

std::string_view SourceText(const SyntaxTree& tree, const Node& node) {
  return tree.Text(node);
}

bool IsComment(std::string_view kind) {
  return kind == "line_comment" || kind == "block_comment" ||
         kind == "comment";
}

std::vector<Node> Statements(const Node& container) {
  std::vector<Node> out;
  for (const Node& child : container.NamedChildren()) {
    if (!IsComment(child.Kind())) out.push_back(child);
  }
  return out;
}

// Field name under which `node` hangs off its parent.
std::string_view FieldName(const Node& node) {
  Node parent = node.Parent();
  if (parent.IsNull()) return {};
  for (uint32_t i = 0; i < parent.ChildCount(); ++i) {
    if (parent.Child(i) == node) return parent.FieldOfChild(i);
  }
  return {};
}

bool HasChildKind(const Node& node, std::string_view kind) {
  for (const Node& child : node.Children()) {
    if (child.Kind() == kind) return true;
  }
  return false;
}

bool ContainsKind(const Node& root, const std::set<std::string_view>& kinds) {
  bool found = false;
  VisitPreorder(root, [&](const Node& n) {
    if (kinds.count(n.Kind())) found = true;
  });
  return found;
}

std::string LineIndent(const std::string& source, uint32_t pos) {
  size_t line = source.rfind('\n', pos == 0 ? 0 : pos - 1);
  line = line == std::string::npos ? 0 : line + 1;
  size_t end = line;
  while (end < source.size() && (source[end] == ' ' || source[end] == '\t')) {
    ++end;
  }
  return source.substr(line, end - line);
}

uint64_t Fnv1a(std::string_view text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::mt19937_64 SnippetRng(uint64_t seed, std::string_view id) {
  return std::mt19937_64(seed ^ Fnv1a(id));
}

double Uniform(std::mt19937_64& rng) { return (rng() >> 11) * 0x1p-53; }

CorrespondenceMap IdentityMap(const Snippet& snippet, size_t tokens) {
  CorrespondenceMap map;
  map.original_snippet_id = snippet.id;
  map.perturbed_snippet_id = snippet.id;
  for (size_t i = 0; i < tokens; ++i) {
    map.pairs.emplace_back(static_cast<int32_t>(i), static_cast<int32_t>(i));
  }
  return map;
}

PerturbationResult Unchanged(const Snippet& snippet) {
  PerturbationResult result;
  result.perturbed = snippet;
  result.map = IdentityMap(snippet, Tokenize(snippet).size());
  result.applicable = false;
  return result;
}

PerturbationResult Render(const Snippet& original, std::vector<Edit> edits,
                          std::map<std::string, std::string> substitutions) {
  if (edits.empty()) return Unchanged(original);
  std::stable_sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
    if (a.start != b.start) return a.start < b.start;
    return (a.end == a.start) && (b.end != b.start);
  });

  struct Placed {
    bool copy;
    uint32_t start, end;  // original range
    uint32_t out;         // output offset of start (copy) or anchor token
  };
  std::vector<Placed> placed;
  std::string out;
  const std::string& src = original.source;
  auto emit = [&](const Segment& seg) {
    if (seg.copy) {
      placed.push_back({true, seg.start, seg.end, static_cast<uint32_t>(out.size())});
      out.append(src, seg.start, seg.end - seg.start);
    } else {
      if (seg.anchor) {
        placed.push_back({false, seg.start, seg.end,
                          static_cast<uint32_t>(out.size() + *seg.anchor)});
      }
      out += seg.text;
    }
  };
  uint32_t pos = 0;
  for (const Edit& edit : edits) {
    if (edit.start < pos) {
      throw Error("internal error: overlapping edits in " + original.id);
    }
    if (pos < edit.start) emit(CopySeg(pos, edit.start));
    for (const Segment& seg : edit.segments) emit(seg);
    pos = edit.end;
  }
  if (pos < src.size()) emit(CopySeg(pos, static_cast<uint32_t>(src.size())));

  PerturbationResult result;
  result.perturbed = {original.id, original.language, out};
  result.substitutions = std::move(substitutions);
  {
    SyntaxTree check(original.language, out);
    if (check.Root().HasError()) {
      throw Error("internal error: perturbed " + original.id +
                  " does not parse");
    }
  }
  const auto before = Tokenize(original);
  const auto after = Tokenize(result.perturbed);
  std::unordered_map<uint32_t, int32_t> by_start;
  for (const auto& t : after) by_start[t.start_byte] = t.token_idx;
  std::vector<bool> used(after.size(), false);

  CorrespondenceMap& map = result.map;
  map.original_snippet_id = original.id;
  map.perturbed_snippet_id = original.id;
  for (const auto& tok : before) {
    std::optional<int32_t> match;
    for (const Placed& p : placed) {
      uint32_t at = 0;
      if (p.copy && tok.start_byte >= p.start && tok.end_byte <= p.end) {
        at = p.out + (tok.start_byte - p.start);
      } else if (!p.copy && tok.start_byte == p.start && tok.end_byte == p.end) {
        at = p.out;
      } else {
        continue;
      }
      auto it = by_start.find(at);
      if (it == by_start.end() || used[it->second]) continue;
      if (p.copy && after[it->second].text != tok.text) continue;
      match = it->second;
      break;
    }
    if (match) {
      used[*match] = true;
      map.pairs.emplace_back(tok.token_idx, *match);
    } else {
      map.unmatched_original.push_back(tok.token_idx);
    }
  }
  for (size_t j = 0; j < after.size(); ++j) {
    if (!used[j]) map.unmatched_perturbed.push_back(static_cast<int32_t>(j));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Java identifier analysis shared by the renaming transforms.

const std::set<std::string>& JavaKeywords() {
  static const std::set<std::string> kWords = {
      "abstract", "assert", "boolean", "break", "byte", "case", "catch",
      "char", "class", "const", "continue", "default", "do", "double", "else",
      "enum", "extends", "final", "finally", "float", "for", "goto", "if",
      "implements", "import", "instanceof", "int", "interface", "long",
      "native", "new", "package", "private", "protected", "public", "return",
      "short", "static", "strictfp", "super", "switch", "synchronized",
      "this", "throw", "throws", "transient", "try", "void", "volatile",
      "while", "true", "false", "null", "var", "yield", "record", "sealed",
      "permits", "_"};
  return kWords;
}

struct JavaNames {
  // Renameable names, by first declaration and by first occurrence.
  std::vector<std::string> by_declaration;
  std::vector<std::string> by_occurrence;
  std::set<std::string> variables;
  std::set<std::string> methods;
  std::map<std::string, std::vector<Node>> occurrences;
  std::set<std::string> identifiers;  // every identifier-like text
};

enum class IdRole { kVariableDecl, kMethodDecl, kMethodCall, kUse, kFixed };

bool IsTypeDeclaration(std::string_view kind) {
  return kind == "class_declaration" || kind == "interface_declaration" ||
         kind == "enum_declaration" || kind == "record_declaration" ||
         kind == "annotation_type_declaration";
}

IdRole ClassifyIdentifier(const SyntaxTree& tree, const Node& node,
                          std::set<std::string>& reserved,
                          std::set<std::string>& bad_methods) {
  const std::string text(SourceText(tree, node));
  const Node parent = node.Parent();
  const std::string_view pk = parent.Kind();
  const std::string_view field = FieldName(node);
  const Node grand = parent.Parent();
  const std::string_view gk = grand.IsNull() ? "" : grand.Kind();

  if (pk == "variable_declarator" && field == "name") {
    if (gk == "local_variable_declaration" || gk == "spread_parameter") {
      return IdRole::kVariableDecl;
    }
    reserved.insert(text);  // fields and interface constants
    return IdRole::kFixed;
  }
  if (pk == "formal_parameter" && field == "name") {
    if (gk == "formal_parameters" && !grand.Parent().IsNull() &&
        grand.Parent().Kind() == "record_declaration") {
      reserved.insert(text);
      return IdRole::kFixed;
    }
    return IdRole::kVariableDecl;
  }
  if ((pk == "catch_formal_parameter" || pk == "enhanced_for_statement" ||
       pk == "resource") &&
      field == "name") {
    return IdRole::kVariableDecl;
  }
  if (pk == "lambda_expression" && field == "parameters") {
    return IdRole::kVariableDecl;
  }
  if (pk == "inferred_parameters") return IdRole::kVariableDecl;
  if (pk == "method_declaration" && field == "name") return IdRole::kMethodDecl;
  if (pk == "method_invocation" && field == "name") {
    const Node object = parent.Field("object");
    if (object.IsNull() || object.Kind() == "this") return IdRole::kMethodCall;
    bad_methods.insert(text);
    return IdRole::kFixed;
  }
  if (pk == "method_reference") {
    // Identifiers after "::" name methods; the one before may be a variable.
    bool after_colons = false;
    for (const Node& child : parent.Children()) {
      if (child.Kind() == "::") after_colons = true;
      if (child == node) break;
    }
    if (after_colons) {
      bad_methods.insert(text);
      return IdRole::kFixed;
    }
    return IdRole::kUse;
  }
  if (pk == "field_access" && field == "field") return IdRole::kFixed;
  if (IsTypeDeclaration(pk) || pk == "constructor_declaration" ||
      pk == "enum_constant" || pk == "instanceof_expression" ||
      pk == "type_pattern" || pk == "record_pattern_component") {
    reserved.insert(text);
    return IdRole::kFixed;
  }
  if (pk == "labeled_statement" || pk == "break_statement" ||
      pk == "continue_statement" || pk == "scoped_identifier" ||
      pk == "marker_annotation" || pk == "annotation" ||
      pk == "element_value_pair" || pk == "package_declaration" ||
      pk == "import_declaration" || pk == "module_declaration") {
    return IdRole::kFixed;
  }
  return IdRole::kUse;
}

bool HasModifier(const Node& declaration, std::string_view word) {
  for (const Node& child : declaration.Children()) {
    if (child.Kind() != "modifiers") continue;
    for (const Node& m : child.Children()) {
      if (m.Kind() == word) return true;
    }
  }
  return false;
}

JavaNames AnalyzeJavaNames(const SyntaxTree& tree) {
  struct Site {
    Node node;
    std::string text;
    IdRole role;
  };
  std::vector<Site> sites;
  std::set<std::string> reserved;
  std::set<std::string> bad_methods;
  std::set<std::string> declared_variables;
  std::map<std::string, bool> method_ok;  // name -> every declaration eligible
  JavaNames names;

  VisitPreorder(tree.Root(), [&](const Node& n) {
    const std::string_view kind = n.Kind();
    if (kind == "type_identifier") {
      names.identifiers.insert(std::string(SourceText(tree, n)));
      return;
    }
    if (kind != "identifier") return;
    std::string text(SourceText(tree, n));
    names.identifiers.insert(text);
    const IdRole role = ClassifyIdentifier(tree, n, reserved, bad_methods);
    if (role == IdRole::kVariableDecl) declared_variables.insert(text);
    if (role == IdRole::kMethodDecl) {
      const Node decl = n.Parent();
      const bool eligible =
          text != "main" &&
          (HasModifier(decl, "static") || HasModifier(decl, "private"));
      auto [it, inserted] = method_ok.emplace(text, eligible);
      if (!inserted) it->second = it->second && eligible;
    }
    sites.push_back({n, std::move(text), role});
  });

  for (const auto& v : declared_variables) {
    if (!reserved.count(v)) names.variables.insert(v);
  }
  for (const auto& [name, ok] : method_ok) {
    if (ok && !bad_methods.count(name) && !declared_variables.count(name) &&
        !reserved.count(name)) {
      names.methods.insert(name);
    }
  }
  // A name is only renamed when every occurrence can be, so the result is a
  // plain substitution on identifier text.
  for (const Site& site : sites) {
    const bool variable = names.variables.count(site.text) &&
                          (site.role == IdRole::kVariableDecl ||
                           site.role == IdRole::kUse);
    const bool method = names.methods.count(site.text) &&
                        (site.role == IdRole::kMethodDecl ||
                         site.role == IdRole::kMethodCall);
    if (!variable && !method) {
      names.variables.erase(site.text);
      names.methods.erase(site.text);
    }
  }
  std::set<std::string> seen_decl;
  std::set<std::string> seen_use;
  for (const Site& site : sites) {
    const bool variable = names.variables.count(site.text) &&
                          (site.role == IdRole::kVariableDecl ||
                           site.role == IdRole::kUse);
    const bool method = names.methods.count(site.text) &&
                        (site.role == IdRole::kMethodDecl ||
                         site.role == IdRole::kMethodCall);
    if (!variable && !method) continue;
    names.occurrences[site.text].push_back(site.node);
    if (seen_use.insert(site.text).second) {
      names.by_occurrence.push_back(site.text);
    }
    const bool declaration = site.role == IdRole::kVariableDecl ||
                             site.role == IdRole::kMethodDecl;
    if (declaration && seen_decl.insert(site.text).second) {
      names.by_declaration.push_back(site.text);
    }
  }
  // Names used before their declaration still need a declaration slot.
  for (const auto& name : names.by_occurrence) {
    if (seen_decl.insert(name).second) names.by_declaration.push_back(name);
  }
  return names;
}

// Names a renaming may not produce: identifiers that stay as they are.
std::set<std::string> BlockedNames(const JavaNames& names) {
  std::set<std::string> blocked;
  for (const auto& id : names.identifiers) {
    if (!names.occurrences.count(id)) blocked.insert(id);
  }
  return blocked;
}

PerturbationResult ApplyRenaming(const Snippet& snippet, const SyntaxTree& tree,
                                 const JavaNames& names,
                                 const std::map<std::string, std::string>& plan) {
  std::vector<Edit> edits;
  std::map<std::string, std::string> substitutions;
  for (const auto& [from, to] : plan) {
    if (from == to) continue;
    substitutions[from] = to;
    for (const Node& n : names.occurrences.at(from)) {
      edits.push_back(Substitute(n.StartByte(), n.EndByte(), to));
    }
  }
  (void)tree;
  if (substitutions.empty()) {
    // Renaming that maps every name to itself is a valid, applicable no-op.
    PerturbationResult result = Unchanged(snippet);
    result.applicable = !plan.empty();
    return result;
  }
  return Render(snippet, std::move(edits), std::move(substitutions));
}

std::string NextFreeName(const std::string& prefix, int& counter,
                         const std::set<std::string>& blocked) {
  while (blocked.count(prefix + std::to_string(counter))) ++counter;
  return prefix + std::to_string(counter++);
}

PerturbationResult DeterministicRenaming(const Snippet& snippet,
                                         const SyntaxTree& tree) {
  const JavaNames names = AnalyzeJavaNames(tree);
  if (names.by_occurrence.empty()) return Unchanged(snippet);
  const auto blocked = BlockedNames(names);
  std::map<std::string, std::string> plan;
  int counter = 0;
  for (const auto& name : names.by_occurrence) {
    plan[name] = NextFreeName("v", counter, blocked);
  }
  return ApplyRenaming(snippet, tree, names, plan);
}

PerturbationResult CanonicalSubstitution(const Snippet& snippet,
                                         const SyntaxTree& tree) {
  const JavaNames names = AnalyzeJavaNames(tree);
  if (names.by_declaration.empty()) return Unchanged(snippet);
  const auto blocked = BlockedNames(names);
  std::map<std::string, std::string> plan;
  int vars = 1;
  int fns = 1;
  for (const auto& name : names.by_declaration) {
    plan[name] = names.methods.count(name) ? NextFreeName("fn", fns, blocked)
                                           : NextFreeName("var", vars, blocked);
  }
  return ApplyRenaming(snippet, tree, names, plan);
}

const std::regex& SnakeCase() {
  static const std::regex kRe("^[a-z][a-z0-9]*(_[a-z0-9]+)+$");
  return kRe;
}
const std::regex& LowerCamelCase() {
  static const std::regex kRe("^[a-z][a-z0-9]*([A-Z][a-z0-9]*)+$");
  return kRe;
}

std::optional<std::string> ToggleCaseStyle(const std::string& name) {
  std::string out;
  if (std::regex_match(name, SnakeCase())) {
    bool upper = false;
    for (char c : name) {
      if (c == '_') {
        upper = true;
        continue;
      }
      out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                   : c;
      upper = false;
    }
    return out;
  }
  if (std::regex_match(name, LowerCamelCase())) {
    for (char c : name) {
      if (std::isupper(static_cast<unsigned char>(c))) {
        out += '_';
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      } else {
        out += c;
      }
    }
    return out;
  }
  return std::nullopt;
}

PerturbationResult CasingVariation(const Snippet& snippet,
                                   const SyntaxTree& tree) {
  const JavaNames names = AnalyzeJavaNames(tree);
  auto blocked = BlockedNames(names);
  for (const auto& name : names.by_occurrence) blocked.insert(name);
  std::map<std::string, std::string> plan;
  std::set<std::string> produced;
  for (const auto& name : names.by_occurrence) {
    auto target = ToggleCaseStyle(name);
    if (!target || *target == name || blocked.count(*target) ||
        produced.count(*target) || JavaKeywords().count(*target)) {
      continue;
    }
    produced.insert(*target);
    plan[name] = *target;
  }
  if (plan.empty()) return Unchanged(snippet);
  return ApplyRenaming(snippet, tree, names, plan);
}

PerturbationResult MinimalCasing(const Snippet& snippet, const SyntaxTree& tree,
                                 const PerturbationOptions& options) {
  const JavaNames names = AnalyzeJavaNames(tree);
  auto blocked = BlockedNames(names);
  for (const auto& name : names.by_occurrence) blocked.insert(name);
  std::vector<std::pair<std::string, std::string>> options_list;
  for (const auto& name : names.by_occurrence) {
    for (size_t i = 0; i < name.size(); ++i) {
      const auto c = static_cast<unsigned char>(name[i]);
      if (!std::isalpha(c)) continue;
      // A leading capital could collide with a type name outside the snippet.
      if (i == 0 && std::islower(c)) continue;
      std::string flipped = name;
      flipped[i] = static_cast<char>(std::islower(c) ? std::toupper(c)
                                                     : std::tolower(c));
      if (blocked.count(flipped) || JavaKeywords().count(flipped)) continue;
      options_list.emplace_back(name, std::move(flipped));
    }
  }
  if (options_list.empty()) return Unchanged(snippet);
  auto rng = SnippetRng(options.seed, snippet.id);
  const auto& [from, to] = options_list[rng() % options_list.size()];
  return ApplyRenaming(snippet, tree, names, {{from, to}});
}

// ---------------------------------------------------------------------------
// Java statement-level transforms.

// Method and constructor bodies in source order; optionally only those not
// nested inside another body.
std::vector<Node> FunctionBodies(const SyntaxTree& tree,
                                 bool outermost_only = false) {
  std::vector<Node> bodies;
  uint32_t covered_until = 0;
  VisitPreorder(tree.Root(), [&](const Node& n) {
    if (n.Kind() != "method_declaration" &&
        n.Kind() != "constructor_declaration") {
      return;
    }
    Node body = n.Field("body");
    if (body.IsNull()) return;
    if (outermost_only && body.StartByte() < covered_until) return;
    covered_until = std::max(covered_until, body.EndByte());
    bodies.push_back(body);
  });
  return bodies;
}

std::vector<Node> StatementContainers(const SyntaxTree& tree) {
  std::vector<Node> out;
  VisitPreorder(tree.Root(), [&](const Node& n) {
    if (n.Kind() == "block" || n.Kind() == "constructor_body") {
      out.push_back(n);
    }
  });
  return out;
}

std::string StripParens(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c != '(' && c != ')' && !std::isspace(static_cast<unsigned char>(c))) {
      out += c;
    }
  }
  return out;
}

// Conservative version of the reachability rule "can complete normally":
// false whenever unsure, so nothing is ever inserted where it would be
// unreachable.
bool CanCompleteNormally(const SyntaxTree& tree, const Node& stmt) {
  const std::string_view kind = stmt.Kind();
  if (kind == "local_variable_declaration" || kind == "expression_statement" ||
      kind == "explicit_constructor_invocation" || kind == "assert_statement" ||
      kind == "enhanced_for_statement") {
    return true;
  }
  if (kind == "block") {
    for (const Node& child : Statements(stmt)) {
      if (!CanCompleteNormally(tree, child)) return false;
    }
    return true;
  }
  if (kind == "if_statement") {
    Node alternative = stmt.Field("alternative");
    if (alternative.IsNull()) return true;
    return CanCompleteNormally(tree, stmt.Field("consequence")) ||
           CanCompleteNormally(tree, alternative);
  }
  if (kind == "while_statement") {
    return StripParens(SourceText(tree, stmt.Field("condition"))) != "true";
  }
  if (kind == "do_statement") {
    return StripParens(SourceText(tree, stmt.Field("condition"))) != "true" &&
           CanCompleteNormally(tree, stmt.Field("body"));
  }
  if (kind == "for_statement") {
    Node condition = stmt.Field("condition");
    return !condition.IsNull() &&
           StripParens(SourceText(tree, condition)) != "true";
  }
  if (kind == "synchronized_statement") {
    return CanCompleteNormally(tree, stmt.Field("body"));
  }
  return false;
}

constexpr std::string_view kDiagnostic = "System.err.print(\"\");";

const std::vector<std::string>& DiagnosticTokens() {
  static const std::vector<std::string> kTokens = {
      "System", ".", "err", ".", "print", "(", "\"\"", ")", ";"};
  return kTokens;
}

PerturbationResult Instrumentation(const Snippet& snippet,
                                   const SyntaxTree& tree) {
  std::vector<Edit> edits;
  for (const Node& body : FunctionBodies(tree)) {
    for (const Node& stmt : Statements(body)) {
      if (!CanCompleteNormally(tree, stmt)) continue;
      edits.push_back(InsertAt(stmt.EndByte(),
                               "\n" + LineIndent(snippet.source, stmt.StartByte()) +
                                   std::string(kDiagnostic)));
    }
  }
  return Render(snippet, std::move(edits), {});
}

PerturbationResult NoOpInjection(const Snippet& snippet, const SyntaxTree& tree,
                                 const PerturbationOptions& options) {
  std::vector<uint32_t> boundaries;
  VisitPreorder(tree.Root(), [&](const Node& n) {
    const std::string_view kind = n.Kind();
    if (kind != "block" && kind != "constructor_body" &&
        kind != "switch_block_statement_group") {
      return;
    }
    for (const Node& stmt : Statements(n)) {
      if (stmt.Kind() == "explicit_constructor_invocation" ||
          stmt.Kind() == "switch_label") {
        continue;
      }
      boundaries.push_back(stmt.StartByte());
    }
  });
  if (boundaries.empty()) return Unchanged(snippet);
  auto rng = SnippetRng(options.seed, snippet.id);
  std::vector<uint32_t> chosen;
  for (uint32_t b : boundaries) {
    if (Uniform(rng) < options.noop_density) chosen.push_back(b);
  }
  if (chosen.empty()) chosen.push_back(boundaries[rng() % boundaries.size()]);
  std::vector<Edit> edits;
  for (uint32_t b : chosen) edits.push_back(InsertAt(b, "; "));
  return Render(snippet, std::move(edits), {});
}

PerturbationResult BooleanNegation(const Snippet& snippet,
                                   const SyntaxTree& tree) {
  std::vector<Edit> edits;
  VisitPreorder(tree.Root(), [&](const Node& n) {
    if (n.Kind() != "if_statement" && n.Kind() != "while_statement") return;
    const Node condition = n.Field("condition");
    const auto inner = Statements(condition);
    if (condition.IsNull() || inner.empty()) return;
    edits.push_back(InsertAt(inner.front().StartByte(), "!!("));
    edits.push_back(InsertAt(inner.back().EndByte(), ")"));
  });
  return Render(snippet, std::move(edits), {});
}

// Local declaration `M T x = e;` with one plain declarator.
struct SimpleDeclaration {
  Node statement;
  Node name;
  Node value;  // null when there is no initializer
};

std::optional<SimpleDeclaration> AsSimpleDeclaration(const SyntaxTree& tree,
                                                     const Node& stmt) {
  if (stmt.Kind() != "local_variable_declaration") return std::nullopt;
  std::vector<Node> declarators;
  for (uint32_t i = 0; i < stmt.ChildCount(); ++i) {
    if (stmt.FieldOfChild(i) == "declarator") declarators.push_back(stmt.Child(i));
  }
  if (declarators.size() != 1) return std::nullopt;
  const Node type = stmt.Field("type");
  if (type.IsNull() || SourceText(tree, type) == "var") return std::nullopt;
  const Node& d = declarators.front();
  if (!d.Field("dimensions").IsNull()) return std::nullopt;
  const Node name = d.Field("name");
  if (name.IsNull() || name.Kind() != "identifier") return std::nullopt;
  const Node value = d.Field("value");
  if (!value.IsNull() && value.Kind() == "array_initializer") return std::nullopt;
  return SimpleDeclaration{stmt, name, value};
}

PerturbationResult ScopeReassignment(const Snippet& snippet,
                                     const SyntaxTree& tree) {
  std::vector<Edit> edits;
  for (const Node& body : FunctionBodies(tree, /*outermost_only=*/true)) {
    const auto stmts = Statements(body);
    if (stmts.empty()) continue;
    size_t first = 0;
    uint32_t insert_at = body.StartByte() + 1;  // just after '{'
    if (stmts.front().Kind() == "explicit_constructor_invocation") {
      insert_at = stmts.front().EndByte();
      first = 1;
    }
    std::vector<std::pair<uint32_t, std::string>> seen;  // identifier uses
    VisitPreorder(body, [&](const Node& n) {
      if (n.Kind() == "identifier") {
        seen.emplace_back(n.StartByte(), std::string(SourceText(tree, n)));
      }
    });
    const std::string indent =
        LineIndent(snippet.source, stmts[first < stmts.size() ? first : 0].StartByte());
    Edit hoist{insert_at, insert_at, {}};
    for (size_t i = first; i < stmts.size(); ++i) {
      auto decl = AsSimpleDeclaration(tree, stmts[i]);
      if (!decl) continue;
      const std::string name(SourceText(tree, decl->name));
      const bool used_before = std::any_of(
          seen.begin(), seen.end(), [&](const auto& use) {
            return use.first < decl->statement.StartByte() && use.second == name;
          });
      if (used_before) continue;
      if (i == first && decl->value.IsNull()) continue;  // already in place
      hoist.segments.push_back(InsertSeg("\n" + indent));
      hoist.segments.push_back(
          CopySeg(decl->statement.StartByte(), decl->name.EndByte()));
      hoist.segments.push_back(InsertSeg(";"));
      if (decl->value.IsNull()) {
        edits.push_back({decl->statement.StartByte(),
                         decl->statement.EndByte(), {}});
      } else {
        edits.push_back({decl->statement.StartByte(), decl->name.EndByte(),
                         {InsertSeg(name)}});
      }
    }
    if (!hoist.segments.empty()) edits.push_back(std::move(hoist));
  }
  return Render(snippet, std::move(edits), {});
}

// Identifier read/write sets of a simple statement, or nullopt when the
// statement may have effects beyond plain local assignment.
struct Effects {
  std::set<std::string> reads;
  std::set<std::string> writes;
  bool movable = false;
};

void CollectIdentifiers(const SyntaxTree& tree, const Node& root,
                        std::set<std::string>& out) {
  VisitPreorder(root, [&](const Node& n) {
    if (n.Kind() == "identifier") out.insert(std::string(SourceText(tree, n)));
  });
}

Effects StatementEffects(const SyntaxTree& tree, const Node& stmt) {
  Effects e;
  CollectIdentifiers(tree, stmt, e.reads);
  const std::string_view kind = stmt.Kind();
  if (kind != "local_variable_declaration" && kind != "expression_statement") {
    return e;
  }
  static const std::set<std::string_view> kEffectful = {
      "method_invocation", "object_creation_expression", "lambda_expression",
      "method_reference", "switch_expression", "class_body",
      "explicit_constructor_invocation"};
  if (ContainsKind(stmt, kEffectful)) return e;
  bool plain_targets = true;
  VisitPreorder(stmt, [&](const Node& n) {
    Node target;
    if (n.Kind() == "assignment_expression") target = n.Field("left");
    if (n.Kind() == "update_expression") {
      for (const Node& child : n.NamedChildren()) target = child;
    }
    if (n.Kind() == "variable_declarator") target = n.Field("name");
    if (target.IsNull()) return;
    if (target.Kind() != "identifier") plain_targets = false;
    CollectIdentifiers(tree, target, e.writes);
  });
  e.movable = plain_targets;
  return e;
}

bool Conflicts(const Effects& a, const Effects& b) {
  auto meets = [](const std::set<std::string>& x,
                  const std::set<std::string>& y) {
    return std::any_of(x.begin(), x.end(),
                       [&](const std::string& s) { return y.count(s) > 0; });
  };
  return meets(a.writes, b.reads) || meets(a.writes, b.writes) ||
         meets(b.writes, a.reads);
}

bool Swappable(const Effects& a, const Effects& b) {
  return a.movable && b.movable && !Conflicts(a, b);
}

PerturbationResult StatementReordering(const Snippet& snippet,
                                       const SyntaxTree& tree,
                                       const PerturbationOptions& options) {
  std::vector<std::pair<Node, Node>> eligible;
  for (const Node& container : StatementContainers(tree)) {
    const auto stmts = Statements(container);
    for (size_t i = 0; i + 1 < stmts.size(); ++i) {
      if (Swappable(StatementEffects(tree, stmts[i]),
                    StatementEffects(tree, stmts[i + 1]))) {
        eligible.emplace_back(stmts[i], stmts[i + 1]);
      }
    }
  }
  if (eligible.empty()) return Unchanged(snippet);
  auto rng = SnippetRng(options.seed, snippet.id);
  std::vector<size_t> chosen;
  uint32_t last_end = 0;
  for (size_t i = 0; i < eligible.size(); ++i) {
    const bool take = Uniform(rng) < 0.5;
    if (take && eligible[i].first.StartByte() >= last_end) {
      chosen.push_back(i);
      last_end = eligible[i].second.EndByte();
    }
  }
  if (chosen.empty()) chosen.push_back(rng() % eligible.size());
  std::vector<Edit> edits;
  for (size_t i : chosen) {
    const auto& [a, b] = eligible[i];
    edits.push_back({a.StartByte(), b.EndByte(),
                     {CopySeg(b.StartByte(), b.EndByte()),
                      CopySeg(a.EndByte(), b.StartByte()),
                      CopySeg(a.StartByte(), a.EndByte())}});
  }
  return Render(snippet, std::move(edits), {});
}

bool IsCaseLiteral(const Node& n) {
  static const std::set<std::string_view> kLiterals = {
      "decimal_integer_literal", "hex_integer_literal", "octal_integer_literal",
      "binary_integer_literal", "character_literal", "string_literal"};
  if (kLiterals.count(n.Kind())) return true;
  if (n.Kind() == "unary_expression") {
    const auto operands = n.NamedChildren();
    return operands.size() == 1 && kLiterals.count(operands[0].Kind()) &&
           operands[0].Kind() != "string_literal" &&
           operands[0].Kind() != "character_literal";
  }
  return false;
}

bool IsStatementContainer(std::string_view kind) {
  return kind == "block" || kind == "constructor_body" ||
         kind == "switch_block_statement_group";
}

struct CaseGroup {
  std::vector<Node> labels;  // case expressions; empty for default
  bool is_default = false;
  std::vector<Node> body;    // statements kept in the branch
};

// Case groups of a switch that can become an if/else chain, or nullopt.
std::optional<std::vector<CaseGroup>> ConvertibleSwitch(const SyntaxTree& tree,
                                                        const Node& sw) {
  if (!IsStatementContainer(sw.Parent().Kind())) return std::nullopt;
  const auto selector = Statements(sw.Field("condition"));
  if (selector.size() != 1) return std::nullopt;
  const Node& sel = selector[0];
  if (sel.Kind() != "identifier" &&
      !(sel.Kind() == "field_access" &&
        (sel.Field("object").Kind() == "this" ||
         sel.Field("object").Kind() == "identifier"))) {
    return std::nullopt;
  }
  std::vector<CaseGroup> groups;
  CaseGroup pending;
  const auto children = Statements(sw.Field("body"));
  for (size_t g = 0; g < children.size(); ++g) {
    const Node& group = children[g];
    if (group.Kind() != "switch_block_statement_group") return std::nullopt;
    std::vector<Node> stmts;
    for (const Node& child : Statements(group)) {
      if (child.Kind() != "switch_label") {
        stmts.push_back(child);
        continue;
      }
      const auto exprs = child.NamedChildren();
      if (exprs.empty()) {
        pending.is_default = true;
        continue;
      }
      for (const Node& e : exprs) {
        if (!IsCaseLiteral(e)) return std::nullopt;
        pending.labels.push_back(e);
      }
    }
    const bool last = g + 1 == children.size();
    if (stmts.empty()) {
      if (last) return std::nullopt;  // trailing label without statements
      continue;                       // falls through into the next group
    }
    // Every group but the last must end the switch explicitly.
    const Node tail = stmts.back();
    const bool plain_break = tail.Kind() == "break_statement" &&
                             tail.NamedChildCount() == 0;
    const bool exits = plain_break || tail.Kind() == "return_statement" ||
                       tail.Kind() == "throw_statement" ||
                       tail.Kind() == "continue_statement";
    if (!last && !exits) return std::nullopt;
    if (plain_break) stmts.pop_back();
    for (const Node& s : stmts) {
      if (ContainsKind(s, {"break_statement", "yield_statement"})) {
        return std::nullopt;
      }
    }
    if (pending.is_default && (!last || !pending.labels.empty())) {
      return std::nullopt;
    }
    pending.body = std::move(stmts);
    groups.push_back(std::move(pending));
    pending = CaseGroup{};
  }
  if (groups.empty() || groups.front().is_default) return std::nullopt;
  // Locals declared in one group must not be visible from another.
  for (size_t i = 0; i < groups.size(); ++i) {
    std::set<std::string> declared;
    for (const Node& s : groups[i].body) {
      if (s.Kind() != "local_variable_declaration") continue;
      for (uint32_t c = 0; c < s.ChildCount(); ++c) {
        if (s.FieldOfChild(c) == "declarator") {
          declared.insert(std::string(SourceText(tree, s.Child(c).Field("name"))));
        }
      }
    }
    for (size_t j = 0; j < groups.size(); ++j) {
      if (i == j) continue;
      std::set<std::string> used;
      for (const Node& s : groups[j].body) CollectIdentifiers(tree, s, used);
      for (const auto& d : declared) {
        if (used.count(d)) return std::nullopt;
      }
    }
  }
  return groups;
}

PerturbationResult SwitchToIf(const Snippet& snippet, const SyntaxTree& tree) {
  std::vector<Edit> edits;
  uint32_t covered_until = 0;
  VisitPreorder(tree.Root(), [&](const Node& sw) {
    if (sw.Kind() != "switch_expression" || sw.StartByte() < covered_until) {
      return;
    }
    auto groups = ConvertibleSwitch(tree, sw);
    if (!groups) return;
    covered_until = sw.EndByte();
    const Node sel = Statements(sw.Field("condition"))[0];
    const std::string sel_text(SourceText(tree, sel));
    const std::string indent = LineIndent(snippet.source, sw.StartByte());
    Edit edit{sw.StartByte(), sw.EndByte(), {}};
    auto& segs = edit.segments;
    bool selector_copied = false;
    for (size_t g = 0; g < groups->size(); ++g) {
      const CaseGroup& group = (*groups)[g];
      if (g > 0) segs.push_back(InsertSeg(" else "));
      if (group.is_default) {
        segs.push_back(InsertSeg("{"));
      } else {
        segs.push_back(InsertSeg("if ("));
        for (size_t l = 0; l < group.labels.size(); ++l) {
          const Node& label = group.labels[l];
          if (l > 0) segs.push_back(InsertSeg(" || "));
          if (!selector_copied) {
            segs.push_back(CopySeg(sel.StartByte(), sel.EndByte()));
            selector_copied = true;
          } else {
            segs.push_back(InsertSeg(sel_text));
          }
          const bool text = label.Kind() == "string_literal";
          segs.push_back(InsertSeg(text ? ".equals(" : " == "));
          segs.push_back(CopySeg(label.StartByte(), label.EndByte()));
          if (text) segs.push_back(InsertSeg(")"));
        }
        segs.push_back(InsertSeg(") {"));
      }
      if (!group.body.empty()) {
        segs.push_back(InsertSeg("\n" + indent + "  "));
        segs.push_back(CopySeg(group.body.front().StartByte(),
                               group.body.back().EndByte()));
      }
      segs.push_back(InsertSeg("\n" + indent + "}"));
    }
    edits.push_back(std::move(edit));
  });
  return Render(snippet, std::move(edits), {});
}

// ---------------------------------------------------------------------------
// C: pointer aliasing.

Node DeclaratorName(Node d) {
  while (!d.IsNull() && d.Kind() != "identifier") {
    Node inner = d.Field("declarator");
    if (inner.IsNull()) return Node();
    d = inner;
  }
  return d;
}

PerturbationResult PointerIntroduction(const Snippet& snippet,
                                       const SyntaxTree& tree) {
  std::vector<Edit> edits;
  std::set<std::string> taken;
  VisitPreorder(tree.Root(), [&](const Node& n) {
    if (n.Kind() == "identifier" || n.Kind() == "type_identifier" ||
        n.Kind() == "field_identifier") {
      taken.insert(std::string(SourceText(tree, n)));
    }
  });
  std::map<std::string, std::string> substitutions;

  VisitPreorder(tree.Root(), [&](const Node& fn) {
    if (fn.Kind() != "function_definition") return;
    const Node body = fn.Field("body");
    if (body.IsNull() || ContainsKind(body, {"goto_statement"})) return;
    std::map<std::string, int> declared;
    std::set<std::string> called;
    VisitPreorder(fn, [&](const Node& n) {
      if (n.Kind() == "declaration" || n.Kind() == "parameter_declaration") {
        for (uint32_t i = 0; i < n.ChildCount(); ++i) {
          if (n.FieldOfChild(i) != "declarator") continue;
          Node name = DeclaratorName(n.Child(i));
          if (!name.IsNull()) ++declared[std::string(SourceText(tree, name))];
        }
      }
      if (n.Kind() == "call_expression") {
        Node f = n.Field("function");
        if (f.Kind() == "identifier") called.insert(std::string(SourceText(tree, f)));
      }
    });
    VisitPreorder(body, [&](const Node& decl) {
      if (decl.Kind() != "declaration" ||
          decl.Parent().Kind() != "compound_statement" ||
          HasChildKind(decl, "storage_class_specifier")) {
        return;
      }
      const Node type = decl.Field("type");
      if (type.Kind() != "primitive_type" &&
          type.Kind() != "sized_type_specifier") {
        return;
      }
      std::vector<Node> names;
      uint32_t first_declarator = decl.EndByte();
      for (uint32_t i = 0; i < decl.ChildCount(); ++i) {
        if (decl.FieldOfChild(i) != "declarator") continue;
        Node d = decl.Child(i);
        first_declarator = std::min(first_declarator, d.StartByte());
        Node target = d.Kind() == "init_declarator" ? d.Field("declarator") : d;
        if (target.Kind() != "identifier") continue;
        if (d.Kind() == "init_declarator" &&
            d.Field("value").Kind() == "initializer_list") {
          continue;
        }
        const std::string name(SourceText(tree, target));
        if (declared[name] != 1 || called.count(name)) continue;
        names.push_back(target);
      }
      if (names.empty()) return;
      std::string type_text(snippet.source.substr(
          decl.StartByte(), first_declarator - decl.StartByte()));
      while (!type_text.empty() &&
             std::isspace(static_cast<unsigned char>(type_text.back()))) {
        type_text.pop_back();
      }
      const std::string indent = LineIndent(snippet.source, decl.StartByte());
      const Node scope = decl.Parent();
      std::string inserted;
      for (const Node& target : names) {
        const std::string name(SourceText(tree, target));
        std::string alias = name + "_p";
        while (taken.count(alias)) alias += "_p";
        taken.insert(alias);
        substitutions[name] = alias;
        inserted += "\n" + indent + type_text + " *" + alias + " = &" + name + ";";
        VisitPreorder(scope, [&](const Node& use) {
          if (use.Kind() != "identifier" || use.StartByte() < decl.EndByte() ||
              SourceText(tree, use) != name) {
            return;
          }
          const Node parent = use.Parent();
          const std::string_view pk = parent.Kind();
          const std::string_view field = FieldName(use);
          if ((pk == "assignment_expression" && field == "left") ||
              pk == "update_expression" ||
              (pk == "pointer_expression" &&
               SourceText(tree, parent.Child(0)) == "&") ||
              (pk == "call_expression" && field == "function") ||
              pk == "init_declarator" || pk == "declaration") {
            return;
          }
          edits.push_back(Substitute(use.StartByte(), use.EndByte(),
                                     "(*" + alias + ")", 2));
        });
      }
      edits.push_back(InsertAt(decl.EndByte(), inserted));
    });
  });
  return Render(snippet, std::move(edits), std::move(substitutions));
}

// ---------------------------------------------------------------------------
// Validation helpers.

struct TokenView {
  std::vector<std::string> texts;
  std::vector<std::string> tags;
  std::vector<uint32_t> starts;
  std::vector<uint32_t> ends;
};

// Tokens of a snippet without comments.
TokenView ViewOf(const Snippet& snippet) {
  TokenView view;
  for (const auto& t : TokenizeTagged(snippet)) {
    if (IsComment(t.tag)) continue;
    view.texts.push_back(t.token.text);
    view.tags.push_back(t.tag);
    view.starts.push_back(t.token.start_byte);
    view.ends.push_back(t.token.end_byte);
  }
  return view;
}

// Token texts in [start, end) joined with spaces.
std::string RangeText(const TokenView& view, uint32_t start, uint32_t end) {
  std::string out;
  auto it = std::lower_bound(view.starts.begin(), view.starts.end(), start);
  for (size_t i = it - view.starts.begin();
       i < view.starts.size() && view.ends[i] <= end; ++i) {
    if (!out.empty()) out += ' ';
    out += view.texts[i];
  }
  return out;
}

std::string FirstDifference(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) {
      return "token " + std::to_string(i) + ": '" + a[i] + "' vs '" + b[i] + "'";
    }
  }
  return "lengths " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
}

bool IsRenamingKind(PerturbationKind kind) {
  return kind == PerturbationKind::kDeterministicIdentifierRenaming ||
         kind == PerturbationKind::kIdentifierCasingVariation ||
         kind == PerturbationKind::kMinimalCasingPerturbation ||
         kind == PerturbationKind::kCanonicalIdentifierSubstitution;
}

void CheckRenaming(const TokenView& a, const TokenView& b,
                   PerturbationKind kind, ValidationReport& report) {
  if (a.texts.size() != b.texts.size()) {
    report.problems.push_back("token counts differ: " +
                              std::to_string(a.texts.size()) + " vs " +
                              std::to_string(b.texts.size()));
    return;
  }
  std::map<std::string, std::string> forward;
  std::map<std::string, std::string> backward;
  for (size_t i = 0; i < a.texts.size(); ++i) {
    if (a.texts[i] == b.texts[i] && a.tags[i] != "identifier") continue;
    if (a.tags[i] != "identifier" || b.tags[i] != "identifier") {
      report.problems.push_back("non-identifier token changed at " +
                                std::to_string(i) + ": '" + a.texts[i] +
                                "' -> '" + b.texts[i] + "'");
      continue;
    }
    auto [f, f_new] = forward.emplace(a.texts[i], b.texts[i]);
    if (!f_new && f->second != b.texts[i]) {
      report.problems.push_back("identifier '" + a.texts[i] +
                                "' renamed inconsistently: '" + f->second +
                                "' and '" + b.texts[i] + "'");
    }
    auto [r, r_new] = backward.emplace(b.texts[i], a.texts[i]);
    if (!r_new && r->second != a.texts[i]) {
      report.problems.push_back("identifiers '" + r->second + "' and '" +
                                a.texts[i] + "' both renamed to '" +
                                b.texts[i] + "'");
    }
  }
  std::vector<std::pair<std::string, std::string>> changed;
  for (const auto& [from, to] : forward) {
    if (from != to) changed.emplace_back(from, to);
  }
  static const std::regex kV("^v[0-9]+$");
  static const std::regex kCanon("^(var|fn)[0-9]+$");
  for (const auto& [from, to] : changed) {
    bool ok = true;
    switch (kind) {
      case PerturbationKind::kDeterministicIdentifierRenaming:
        ok = std::regex_match(to, kV);
        break;
      case PerturbationKind::kCanonicalIdentifierSubstitution:
        ok = std::regex_match(to, kCanon);
        break;
      case PerturbationKind::kIdentifierCasingVariation:
        ok = ToggleCaseStyle(from) == to;
        break;
      case PerturbationKind::kMinimalCasingPerturbation: {
        size_t diffs = 0;
        ok = from.size() == to.size();
        for (size_t i = 0; ok && i < from.size(); ++i) {
          if (from[i] == to[i]) continue;
          ++diffs;
          ok = std::tolower(static_cast<unsigned char>(from[i])) ==
               std::tolower(static_cast<unsigned char>(to[i]));
        }
        ok = ok && diffs == 1;
        break;
      }
      default:
        break;
    }
    if (!ok) {
      report.problems.push_back("identifier '" + from + "' -> '" + to +
                                "' does not follow the " +
                                std::string(PerturbationName(kind)) + " scheme");
    }
  }
  if (kind == PerturbationKind::kMinimalCasingPerturbation && changed.size() > 1) {
    report.problems.push_back("more than one identifier changed (" +
                              std::to_string(changed.size()) + ")");
  }
}

void CheckInsertion(const TokenView& a, const TokenView& b,
                    const std::vector<std::string>& allowed_unit,
                    ValidationReport& report) {
  size_t j = 0;
  for (size_t i = 0; i < a.texts.size(); ++i) {
    while (j < b.texts.size() && b.texts[j] != a.texts[i]) ++j;
    if (j == b.texts.size()) {
      report.problems.push_back("original token " + std::to_string(i) + " '" +
                                a.texts[i] +
                                "' missing: not a subsequence of the output");
      return;
    }
    ++j;
  }
  std::map<std::string, long> extra;
  for (const auto& t : b.texts) ++extra[t];
  for (const auto& t : a.texts) --extra[t];
  std::map<std::string, long> unit;
  for (const auto& t : allowed_unit) ++unit[t];
  long copies = -1;
  for (const auto& [text, count] : extra) {
    if (count == 0) continue;
    if (!unit.count(text) || count < 0 || count % unit[text] != 0) {
      report.problems.push_back("unexpected inserted token '" + text + "'");
      return;
    }
    const long c = count / unit[text];
    if (copies >= 0 && c != copies) {
      report.problems.push_back("inserted tokens do not form whole statements");
      return;
    }
    copies = c;
  }
}

void CheckNegation(const Snippet& original, const Snippet& perturbed,
                   const TokenView& a, const TokenView& b,
                   ValidationReport& report) {
  SyntaxTree before(original.language, original.source);
  SyntaxTree after(perturbed.language, perturbed.source);
  auto conditions = [](const SyntaxTree& tree) {
    std::vector<Node> out;
    VisitPreorder(tree.Root(), [&](const Node& n) {
      if (n.Kind() == "if_statement" || n.Kind() == "while_statement") {
        out.push_back(n.Field("condition"));
      }
    });
    return out;
  };
  const auto original_conditions = conditions(before);
  std::set<uint32_t> drop;  // start bytes of tokens added by the wrapper
  size_t wrapped = 0;
  for (const Node& cond : conditions(after)) {
    const auto inner = Statements(cond);
    bool ok = inner.size() == 1 && inner[0].Kind() == "unary_expression";
    Node outer_not = ok ? inner[0] : Node();
    Node inner_not;
    Node parens;
    if (ok) {
      inner_not = outer_not.Field("operand");
      ok = SourceText(after, outer_not.Field("operator")) == "!" &&
           !inner_not.IsNull() && inner_not.Kind() == "unary_expression" &&
           SourceText(after, inner_not.Field("operator")) == "!";
    }
    if (ok) {
      parens = inner_not.Field("operand");
      ok = !parens.IsNull() && parens.Kind() == "parenthesized_expression";
    }
    if (!ok) {
      report.problems.push_back("condition '" +
                                std::string(SourceText(after, cond)) +
                                "' is not wrapped in a double negation");
      continue;
    }
    ++wrapped;
    drop.insert(outer_not.StartByte());
    drop.insert(inner_not.StartByte());
    drop.insert(parens.StartByte());
    drop.insert(parens.EndByte() - 1);
  }
  if (wrapped != original_conditions.size()) {
    report.problems.push_back("expected " +
                              std::to_string(original_conditions.size()) +
                              " wrapped conditions, found " +
                              std::to_string(wrapped));
  }
  std::vector<std::string> unwrapped;
  for (size_t i = 0; i < b.texts.size(); ++i) {
    if (!drop.count(b.starts[i])) unwrapped.push_back(b.texts[i]);
  }
  if (unwrapped != a.texts) {
    report.problems.push_back("tokens outside the wrappers differ: " +
                              FirstDifference(a.texts, unwrapped));
  }
}

// Normalized rendering for scope checks: every simple local declaration is
// split into a declaration record and (if initialized) an assignment, and the
// records of each function body are listed sorted.
std::string ScopeCanonical(const Snippet& snippet) {
  SyntaxTree tree(snippet.language, snippet.source);
  const TokenView view = ViewOf(snippet);
  std::string out;
  uint32_t pos = 0;
  for (const Node& body : FunctionBodies(tree, /*outermost_only=*/true)) {
    out += RangeText(view, pos, body.StartByte()) + " {BODY ";
    std::vector<std::string> records;
    for (const Node& stmt : Statements(body)) {
      auto decl = AsSimpleDeclaration(tree, stmt);
      if (!decl) {
        out += RangeText(view, stmt.StartByte(), stmt.EndByte()) + " | ";
        continue;
      }
      records.push_back(RangeText(view, stmt.StartByte(), decl->name.EndByte()));
      if (!decl->value.IsNull()) {
        out += RangeText(view, decl->name.StartByte(), stmt.EndByte()) + " | ";
      }
    }
    std::sort(records.begin(), records.end());
    for (const auto& r : records) out += "DECL " + r + " | ";
    out += "} ";
    pos = body.EndByte();
  }
  out += RangeText(view, pos, static_cast<uint32_t>(snippet.source.size()));
  return out;
}

void CheckPointerAliases(const Snippet& original, const Snippet& perturbed,
                         const TokenView& a, const TokenView& b,
                         ValidationReport& report) {
  SyntaxTree after(perturbed.language, perturbed.source);
  std::map<std::string, std::string> alias_of;
  std::vector<std::pair<uint32_t, uint32_t>> drop;
  VisitPreorder(after.Root(), [&](const Node& n) {
    if (n.Kind() != "declaration") return;
    const Node init = n.Field("declarator");
    if (init.IsNull() || init.Kind() != "init_declarator") return;
    const Node ptr = init.Field("declarator");
    const Node value = init.Field("value");
    if (ptr.Kind() != "pointer_declarator" ||
        ptr.Field("declarator").Kind() != "identifier" ||
        value.Kind() != "pointer_expression" ||
        SourceText(after, value.Field("operator")) != "&" ||
        value.Field("argument").Kind() != "identifier") {
      return;
    }
    const std::string alias(SourceText(after, ptr.Field("declarator")));
    const std::string target(SourceText(after, value.Field("argument")));
    if (alias.rfind(target + "_p", 0) != 0) return;
    alias_of[alias] = target;
    drop.emplace_back(n.StartByte(), n.EndByte());
  });
  std::map<uint32_t, std::pair<uint32_t, std::string>> replace;
  VisitPreorder(after.Root(), [&](const Node& n) {
    if (n.Kind() != "parenthesized_expression") return;
    const auto inner = Statements(n);
    if (inner.size() != 1 || inner[0].Kind() != "pointer_expression") return;
    const Node arg = inner[0].Field("argument");
    if (SourceText(after, inner[0].Field("operator")) != "*" ||
        arg.Kind() != "identifier") {
      return;
    }
    auto it = alias_of.find(std::string(SourceText(after, arg)));
    if (it != alias_of.end()) replace[n.StartByte()] = {n.EndByte(), it->second};
  });
  if (alias_of.empty()) {
    report.problems.push_back("no alias declarations found");
  }
  std::vector<std::string> restored;
  for (size_t i = 0; i < b.texts.size();) {
    const uint32_t s = b.starts[i];
    const bool dropped = std::any_of(drop.begin(), drop.end(), [&](auto r) {
      return s >= r.first && s < r.second;
    });
    if (dropped) {
      ++i;
      continue;
    }
    auto it = replace.find(s);
    if (it != replace.end()) {
      restored.push_back(it->second.second);
      while (i < b.texts.size() && b.starts[i] < it->second.first) ++i;
      continue;
    }
    restored.push_back(b.texts[i]);
    ++i;
  }
  (void)original;
  if (restored != a.texts) {
    report.problems.push_back("output is not the original plus aliases: " +
                              FirstDifference(a.texts, restored));
  }
}

// Statement lists of every block, in preorder, as token strings.
std::vector<std::vector<std::pair<std::string, Node>>> BlockStatements(
    const SyntaxTree& tree, const TokenView& view) {
  std::vector<std::vector<std::pair<std::string, Node>>> out;
  const auto containers = StatementContainers(tree);
  for (const Node& container : containers) {
    auto& list = out.emplace_back();
    for (const Node& stmt : Statements(container)) {
      // Nested blocks are compared on their own; elide them here.
      std::string text;
      uint32_t pos = stmt.StartByte();
      for (const Node& inner : containers) {
        if (inner.StartByte() < pos || inner.EndByte() > stmt.EndByte()) continue;
        text += RangeText(view, pos, inner.StartByte()) + " {...} ";
        pos = inner.EndByte();
      }
      text += RangeText(view, pos, stmt.EndByte());
      list.emplace_back(std::move(text), stmt);
    }
  }
  return out;
}

void CheckReordering(const Snippet& original, const Snippet& perturbed,
                     const TokenView& a, const TokenView& b,
                     ValidationReport& report) {
  SyntaxTree before(original.language, original.source);
  SyntaxTree after(perturbed.language, perturbed.source);
  const auto blocks_a = BlockStatements(before, a);
  const auto blocks_b = BlockStatements(after, b);
  if (blocks_a.size() != blocks_b.size()) {
    report.problems.push_back("block structure changed");
    return;
  }
  for (size_t k = 0; k < blocks_a.size(); ++k) {
    const auto& sa = blocks_a[k];
    const auto& sb = blocks_b[k];
    std::multiset<std::string> ma, mb;
    for (const auto& s : sa) ma.insert(s.first);
    for (const auto& s : sb) mb.insert(s.first);
    if (ma != mb) {
      report.problems.push_back("block " + std::to_string(k) +
                                ": statement multiset changed");
      continue;
    }
    // Position of each original statement in the output; equal statements
    // keep their relative order.
    std::vector<size_t> position(sa.size());
    std::vector<bool> taken(sb.size(), false);
    for (size_t i = 0; i < sa.size(); ++i) {
      for (size_t j = 0; j < sb.size(); ++j) {
        if (!taken[j] && sb[j].first == sa[i].first) {
          taken[j] = true;
          position[i] = j;
          break;
        }
      }
    }
    std::vector<Effects> effects;
    for (const auto& s : sa) effects.push_back(StatementEffects(before, s.second));
    for (size_t i = 0; i < sa.size(); ++i) {
      for (size_t j = i + 1; j < sa.size(); ++j) {
        if (Swappable(effects[i], effects[j])) continue;
        if (position[i] > position[j]) {
          report.problems.push_back("dependent statements reordered: '" +
                                    sa[i].first + "' now after '" +
                                    sa[j].first + "'");
        }
      }
    }
  }
}

// Rendering that writes switches and equivalent if/else chains in one form.
class SwitchCanonicalizer {
 public:
  SwitchCanonicalizer(const Snippet& snippet)
      : tree_(snippet.language, snippet.source), view_(ViewOf(snippet)) {}

  std::string Run() {
    std::string out;
    Emit(tree_.Root(), out);
    return out;
  }

 private:
  void Emit(const Node& node, std::string& out) {
    if (node.Kind() == "switch_expression" &&
        IsStatementContainer(node.Parent().Kind())) {
      if (EmitSwitch(node, out)) return;
    }
    if (node.Kind() == "if_statement" &&
        IsStatementContainer(node.Parent().Kind())) {
      if (EmitIfChain(node, out)) return;
    }
    if (IsComment(node.Kind())) return;
    if (node.ChildCount() == 0 || node.Kind() == "string_literal" ||
        node.Kind() == "character_literal") {
      const std::string text = RangeText(view_, node.StartByte(), node.EndByte());
      if (!text.empty()) out += text + " ";
      return;
    }
    for (const Node& child : node.Children()) Emit(child, out);
  }

  bool EmitSwitch(const Node& sw, std::string& out) {
    const auto selector = Statements(sw.Field("condition"));
    if (selector.size() != 1) return false;
    std::string result = "SWITCH[" + Text(selector[0]) + "]{ ";
    std::vector<std::string> labels;
    bool is_default = false;
    for (const Node& group : Statements(sw.Field("body"))) {
      if (group.Kind() != "switch_block_statement_group") return false;
      std::vector<Node> stmts;
      for (const Node& child : Statements(group)) {
        if (child.Kind() != "switch_label") {
          stmts.push_back(child);
          continue;
        }
        const auto exprs = child.NamedChildren();
        if (exprs.empty()) is_default = true;
        for (const Node& e : exprs) labels.push_back(Text(e));
      }
      if (stmts.empty()) continue;
      if (stmts.back().Kind() == "break_statement" &&
          stmts.back().NamedChildCount() == 0) {
        stmts.pop_back();
      }
      result += Arm(labels, is_default, stmts);
      labels.clear();
      is_default = false;
    }
    out += result + "} ";
    return true;
  }

  // `sel == lit`, `sel.equals(lit)` or a disjunction of those.
  bool CaseTest(const Node& e, std::string& sel, std::vector<std::string>& labels) {
    if (e.Kind() == "binary_expression") {
      const std::string op(tree_.Text(e.Field("operator")));
      if (op == "||") {
        return CaseTest(e.Field("left"), sel, labels) &&
               CaseTest(e.Field("right"), sel, labels);
      }
      if (op == "==" && IsCaseLiteral(e.Field("right"))) {
        return Bind(Text(e.Field("left")), sel) &&
               (labels.push_back(Text(e.Field("right"))), true);
      }
      return false;
    }
    if (e.Kind() == "method_invocation" &&
        tree_.Text(e.Field("name")) == "equals" &&
        !e.Field("object").IsNull()) {
      const auto args = Statements(e.Field("arguments"));
      if (args.size() != 1 || args[0].Kind() != "string_literal") return false;
      return Bind(Text(e.Field("object")), sel) &&
             (labels.push_back(Text(args[0])), true);
    }
    return false;
  }

  static bool Bind(const std::string& candidate, std::string& sel) {
    if (sel.empty()) sel = candidate;
    return sel == candidate;
  }

  bool EmitIfChain(const Node& first, std::string& out) {
    std::string sel;
    std::string result;
    Node node = first;
    while (true) {
      const auto cond = Statements(node.Field("condition"));
      std::vector<std::string> labels;
      if (cond.size() != 1 || !CaseTest(cond[0], sel, labels)) return false;
      const Node body = node.Field("consequence");
      if (body.Kind() != "block") return false;
      result += Arm(labels, false, Statements(body));
      const Node alt = node.Field("alternative");
      if (alt.IsNull()) break;
      if (alt.Kind() == "block") {
        result += Arm({}, true, Statements(alt));
        break;
      }
      if (alt.Kind() != "if_statement") return false;
      node = alt;
    }
    out += "SWITCH[" + sel + "]{ " + result + "} ";
    return true;
  }

  std::string Arm(const std::vector<std::string>& labels, bool is_default,
                  const std::vector<Node>& stmts) {
    std::string arm = is_default ? "DEFAULT" : "CASE";
    for (const auto& l : labels) arm += " " + l;
    arm += ": ";
    for (const Node& s : stmts) Emit(s, arm);
    return arm + "; ";
  }

  std::string Text(const Node& n) {
    return RangeText(view_, n.StartByte(), n.EndByte());
  }

  SyntaxTree tree_;
  TokenView view_;
};

void RequireLanguage(PerturbationKind kind, Language language) {
  if (!SupportsLanguage(kind, language)) {
    throw UnsupportedError(std::string(PerturbationName(kind)) +
                           " does not support " +
                           std::string(LanguageName(language)));
  }
}

}  // namespace

std::string_view PerturbationName(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kDeterministicIdentifierRenaming:
      return "DeterministicIdentifierRenaming";
    case PerturbationKind::kIdentifierCasingVariation:
      return "IdentifierCasingVariation";
    case PerturbationKind::kMinimalCasingPerturbation:
      return "MinimalCasingPerturbation";
    case PerturbationKind::kCanonicalIdentifierSubstitution:
      return "CanonicalIdentifierSubstitution";
    case PerturbationKind::kVariableScopeReassignment:
      return "VariableScopeReassignment";
    case PerturbationKind::kInstrumentationInsertion:
      return "InstrumentationInsertion";
    case PerturbationKind::kBooleanExpressionNegation:
      return "BooleanExpressionNegation";
    case PerturbationKind::kPointerIntroduction:
      return "PointerIntroduction";
    case PerturbationKind::kStatementOrderRandomization:
      return "StatementOrderRandomization";
    case PerturbationKind::kSwitchToConditional:
      return "SwitchToConditional";
    case PerturbationKind::kNoOpStatementInjection:
      return "NoOpStatementInjection";
  }
  return "";
}

std::optional<PerturbationKind> PerturbationFromName(std::string_view name) {
  auto squash = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c == '-' || c == '_' || c == ' ') continue;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
  };
  const std::string wanted = squash(name);
  for (PerturbationKind kind : kAllPerturbationKinds) {
    if (squash(PerturbationName(kind)) == wanted) return kind;
  }
  return std::nullopt;
}

bool SupportsLanguage(PerturbationKind kind, Language language) {
  if (kind == PerturbationKind::kPointerIntroduction) {
    return language == Language::kC;
  }
  return language == Language::kJava;
}

CorrespondenceMap CorrespondenceMap::Inverted() const {
  CorrespondenceMap out;
  out.original_snippet_id = perturbed_snippet_id;
  out.perturbed_snippet_id = original_snippet_id;
  for (const auto& [o, p] : pairs) out.pairs.emplace_back(p, o);
  std::sort(out.pairs.begin(), out.pairs.end());
  out.unmatched_original = unmatched_perturbed;
  out.unmatched_perturbed = unmatched_original;
  return out;
}

PerturbationResult ApplyPerturbation(const Snippet& snippet,
                                     PerturbationKind kind,
                                     const PerturbationOptions& options) {
  RequireLanguage(kind, snippet.language);
  SyntaxTree tree(snippet.language, snippet.source);
  if (tree.Root().HasError()) {
    Tokenize(snippet);  // throws SyntaxError with the error spans
    throw SyntaxError("snippet " + snippet.id + " does not parse");
  }
  switch (kind) {
    case PerturbationKind::kDeterministicIdentifierRenaming:
      return DeterministicRenaming(snippet, tree);
    case PerturbationKind::kIdentifierCasingVariation:
      return CasingVariation(snippet, tree);
    case PerturbationKind::kMinimalCasingPerturbation:
      return MinimalCasing(snippet, tree, options);
    case PerturbationKind::kCanonicalIdentifierSubstitution:
      return CanonicalSubstitution(snippet, tree);
    case PerturbationKind::kVariableScopeReassignment:
      return ScopeReassignment(snippet, tree);
    case PerturbationKind::kInstrumentationInsertion:
      return Instrumentation(snippet, tree);
    case PerturbationKind::kBooleanExpressionNegation:
      return BooleanNegation(snippet, tree);
    case PerturbationKind::kPointerIntroduction:
      return PointerIntroduction(snippet, tree);
    case PerturbationKind::kStatementOrderRandomization:
      return StatementReordering(snippet, tree, options);
    case PerturbationKind::kSwitchToConditional:
      return SwitchToIf(snippet, tree);
    case PerturbationKind::kNoOpStatementInjection:
      return NoOpInjection(snippet, tree, options);
  }
  throw UnsupportedError("unknown perturbation kind");
}

std::string ValidationReport::Describe() const {
  if (ok) return "ok";
  std::string out;
  for (const auto& p : problems) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

ValidationReport ValidateSemanticsPreserved(const Snippet& original,
                                            const Snippet& perturbed,
                                            PerturbationKind kind) {
  ValidationReport report;
  for (const Snippet* s : {&original, &perturbed}) {
    SyntaxTree tree(s->language, s->source);
    if (tree.Root().HasError()) {
      report.problems.push_back((s == &original ? "original" : "perturbed") +
                                std::string(" does not parse"));
    }
  }
  if (!report.problems.empty()) {
    report.ok = false;
    return report;
  }
  const TokenView a = ViewOf(original);
  const TokenView b = ViewOf(perturbed);
  if (IsRenamingKind(kind)) {
    CheckRenaming(a, b, kind, report);
  } else {
    switch (kind) {
      case PerturbationKind::kInstrumentationInsertion:
        CheckInsertion(a, b, DiagnosticTokens(), report);
        break;
      case PerturbationKind::kNoOpStatementInjection:
        CheckInsertion(a, b, {";"}, report);
        break;
      case PerturbationKind::kBooleanExpressionNegation:
        CheckNegation(original, perturbed, a, b, report);
        break;
      case PerturbationKind::kVariableScopeReassignment:
        if (ScopeCanonical(original) != ScopeCanonical(perturbed)) {
          report.problems.push_back(
              "declarations or assignments differ after normalizing scope");
        }
        break;
      case PerturbationKind::kPointerIntroduction:
        CheckPointerAliases(original, perturbed, a, b, report);
        break;
      case PerturbationKind::kStatementOrderRandomization:
        CheckReordering(original, perturbed, a, b, report);
        break;
      case PerturbationKind::kSwitchToConditional:
        if (SwitchCanonicalizer(original).Run() !=
            SwitchCanonicalizer(perturbed).Run()) {
          report.problems.push_back("case table differs from the if/else chain");
        }
        break;
      default:
        break;
    }
  }
  report.ok = report.problems.empty();
  return report;
}

void WriteCorrespondenceJsonl(
    std::ostream& out,
    const std::vector<std::pair<PerturbationResult, PerturbationKind>>&
        results) {
  for (const auto& [result, kind] : results) {
    nlohmann::ordered_json j;
    j["original_snippet_id"] = result.map.original_snippet_id;
    j["perturbed_snippet_id"] = result.map.perturbed_snippet_id;
    j["kind"] = PerturbationName(kind);
    j["applicable"] = result.applicable;
    j["pairs"] = result.map.pairs;
    j["unmatched_original"] = result.map.unmatched_original;
    j["unmatched_perturbed"] = result.map.unmatched_perturbed;
    out << j.dump() << '\n';
  }
}

std::vector<CorrespondenceMap> ReadCorrespondenceJsonl(std::istream& in) {
  std::vector<CorrespondenceMap> maps;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CorrespondenceMap map;
      map.original_snippet_id = j.at("original_snippet_id").get<std::string>();
      map.perturbed_snippet_id = j.at("perturbed_snippet_id").get<std::string>();
      map.pairs = j.at("pairs").get<std::vector<std::pair<int32_t, int32_t>>>();
      map.unmatched_original = j.at("unmatched_original").get<std::vector<int32_t>>();
      map.unmatched_perturbed =
          j.at("unmatched_perturbed").get<std::vector<int32_t>>();
      maps.push_back(std::move(map));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("correspondence map line " + std::to_string(line_no) +
                        ": " + e.what());
    }
  }
  return maps;
}

}  // namespace codeconcept
