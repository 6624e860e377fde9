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

#ifndef CODECONCEPT_PERTURB_H_
#define CODECONCEPT_PERTURB_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codeconcept/corpus.h"
#include "codeconcept/language.h"

namespace codeconcept {

enum class PerturbationKind {
  kDeterministicIdentifierRenaming,
  kIdentifierCasingVariation,
  kMinimalCasingPerturbation,
  kCanonicalIdentifierSubstitution,
  kVariableScopeReassignment,
  kInstrumentationInsertion,
  kBooleanExpressionNegation,
  kPointerIntroduction,
  kStatementOrderRandomization,
  kSwitchToConditional,
  kNoOpStatementInjection,
};

inline constexpr PerturbationKind kAllPerturbationKinds[] = {
    PerturbationKind::kDeterministicIdentifierRenaming,
    PerturbationKind::kIdentifierCasingVariation,
    PerturbationKind::kMinimalCasingPerturbation,
    PerturbationKind::kCanonicalIdentifierSubstitution,
    PerturbationKind::kVariableScopeReassignment,
    PerturbationKind::kInstrumentationInsertion,
    PerturbationKind::kBooleanExpressionNegation,
    PerturbationKind::kPointerIntroduction,
    PerturbationKind::kStatementOrderRandomization,
    PerturbationKind::kSwitchToConditional,
    PerturbationKind::kNoOpStatementInjection,
};

std::string_view PerturbationName(PerturbationKind kind);
// Accepts the CamelCase name in any case, with or without '-' / '_'.
std::optional<PerturbationKind> PerturbationFromName(std::string_view name);
bool SupportsLanguage(PerturbationKind kind, Language language);

// Partial bijection between token instances of an original snippet and its
// perturbed version. Every original token is either paired or listed in
// unmatched_original; likewise for perturbed tokens.
struct CorrespondenceMap {
  std::string original_snippet_id;
  std::string perturbed_snippet_id;
  std::vector<std::pair<int32_t, int32_t>> pairs;  // (original, perturbed)
  std::vector<int32_t> unmatched_original;
  std::vector<int32_t> unmatched_perturbed;

  CorrespondenceMap Inverted() const;
  bool operator==(const CorrespondenceMap&) const = default;
};

struct PerturbationOptions {
  uint64_t seed = 42;
  double noop_density = 0.5;  // share of statement boundaries receiving ';'
};

struct PerturbationResult {
  Snippet perturbed;
  CorrespondenceMap map;
  bool applicable = true;
  // Identifier substitutions performed (renaming kinds and aliasing).
  std::map<std::string, std::string> substitutions;
};

// Applies one transform. Throws UnsupportedError when the kind does not
// support the snippet's language and SyntaxError when the input does not
// parse. An inapplicable transform returns the snippet unchanged with an
// identity map and applicable == false.
PerturbationResult ApplyPerturbation(const Snippet& snippet,
                                     PerturbationKind kind,
                                     const PerturbationOptions& options = {});

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> problems;

  std::string Describe() const;
};

// Kind-specific check that `perturbed` is a faithful application of `kind`
// to `original`. Failures indicate a transform bug.
ValidationReport ValidateSemanticsPreserved(const Snippet& original,
                                            const Snippet& perturbed,
                                            PerturbationKind kind);

// JSON Lines: {"original_snippet_id","perturbed_snippet_id","kind",
// "applicable","pairs":[[o,p],...],"unmatched_original":[...],
// "unmatched_perturbed":[...]}.
void WriteCorrespondenceJsonl(
    std::ostream& out,
    const std::vector<std::pair<PerturbationResult, PerturbationKind>>&
        results);
std::vector<CorrespondenceMap> ReadCorrespondenceJsonl(std::istream& in);

}  // namespace codeconcept

#endif  // CODECONCEPT_PERTURB_H_
