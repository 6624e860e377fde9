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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "codeconcept/corpus.h"
#include "codeconcept/discovery.h"
#include "codeconcept/errors.h"
#include "codeconcept/robustness.h"
#include "codeconcept/stub_activations.h"

namespace codeconcept {
namespace {

const Corpus& DemoCorpus() {
  static const Corpus corpus =
      LoadCorpus(std::string(CODECONCEPT_SOURCE_DIR) + "/data/demo_corpus");
  return corpus;
}

TEST(PerturbSweep, EveryKindOnDemoCorpus) {
  for (PerturbationKind kind : kAllPerturbationKinds) {
    int applied = 0;
    for (const Snippet& s : DemoCorpus().snippets) {
      if (!SupportsLanguage(kind, s.language)) continue;
      PerturbationResult r;
      try {
        r = ApplyPerturbation(s, kind);
      } catch (const std::exception& e) {
        ADD_FAILURE() << PerturbationName(kind) << " " << s.id << ": " << e.what();
        continue;
      }
      if (!r.applicable) continue;
      ++applied;
      auto report = ValidateSemanticsPreserved(s, r.perturbed, kind);
      EXPECT_TRUE(report.ok) << PerturbationName(kind) << " " << s.id << ": "
                             << report.Describe() << "\n" << r.perturbed.source;
    }
    std::cerr << PerturbationName(kind) << " applied to " << applied << "\n";
  }
}

std::vector<std::string> Texts(const Snippet& s) {
  std::vector<std::string> out;
  for (const auto& t : Tokenize(s)) out.push_back(t.text);
  return out;
}

Snippet Java(const std::string& id, const std::string& source) {
  return {id, Language::kJava, source};
}

// Length of the longest common subsequence of two token sequences.
size_t LcsLength(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<size_t>> dp(a.size() + 1, std::vector<size_t>(b.size() + 1, 0));
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                      : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  return dp[a.size()][b.size()];
}

void ExpectMapIsPartialBijection(const CorrespondenceMap& map, size_t n_original,
                                 size_t n_perturbed) {
  std::set<int32_t> left(map.unmatched_original.begin(), map.unmatched_original.end());
  std::set<int32_t> right(map.unmatched_perturbed.begin(), map.unmatched_perturbed.end());
  for (const auto& [o, p] : map.pairs) {
    EXPECT_TRUE(left.insert(o).second) << "original " << o << " used twice";
    EXPECT_TRUE(right.insert(p).second) << "perturbed " << p << " used twice";
  }
  EXPECT_EQ(left.size(), n_original);
  EXPECT_EQ(right.size(), n_perturbed);
  if (!left.empty()) EXPECT_EQ(*left.rbegin(), static_cast<int32_t>(n_original) - 1);
  if (!right.empty()) EXPECT_EQ(*right.rbegin(), static_cast<int32_t>(n_perturbed) - 1);
}

TEST(NoOpInjection, OriginalIsSubsequenceAndOnlySemicolonsAdded) {
  for (const Snippet& s : DemoCorpus().snippets) {
    if (s.language != Language::kJava) continue;
    const PerturbationResult r =
        ApplyPerturbation(s, PerturbationKind::kNoOpStatementInjection);
    if (!r.applicable) continue;
    const auto a = Texts(s);
    const auto b = Texts(r.perturbed);
    ASSERT_GT(b.size(), a.size()) << s.id;
    EXPECT_EQ(LcsLength(a, b), a.size()) << s.id;
    // Multiset difference consists of ';' only.
    std::map<std::string, int> diff;
    for (const auto& t : b) ++diff[t];
    for (const auto& t : a) --diff[t];
    for (const auto& [text, count] : diff) {
      if (text == ";") {
        EXPECT_EQ(static_cast<size_t>(count), b.size() - a.size()) << s.id;
      } else {
        EXPECT_EQ(count, 0) << s.id << " token " << text;
      }
    }
    ExpectMapIsPartialBijection(r.map, a.size(), b.size());
    for (const auto& [o, p] : r.map.pairs) EXPECT_EQ(a[o], b[p]) << s.id;
    for (int32_t p : r.map.unmatched_perturbed) EXPECT_EQ(b[p], ";") << s.id;
  }
}

TEST(NoOpInjection, DensityControlsInsertionCount) {
  const Snippet s = Java("D.java",
                         "class D { void m() { int a = 1; a++; a--; a += 2; a -= 1; } }");
  PerturbationOptions all;
  all.noop_density = 1.0;
  const auto full = ApplyPerturbation(s, PerturbationKind::kNoOpStatementInjection, all);
  EXPECT_EQ(full.map.unmatched_perturbed.size(), 5u);
  PerturbationOptions none;
  none.noop_density = 0.0;
  // At least one insertion happens even at zero density.
  EXPECT_EQ(ApplyPerturbation(s, PerturbationKind::kNoOpStatementInjection, none)
                .map.unmatched_perturbed.size(),
            1u);
}

TEST(StatementReordering, OutputIsADependencyRespectingPermutation) {
  const std::string decl_a = "int a = 1;";
  const std::string decl_b = "int b = 2;";
  const std::string use = "use(a, b);";
  const std::vector<std::string> stmts = {decl_a, decl_b, use};
  auto wrap = [](const std::string& body) {
    return "class R { void m() { " + body + " } void use(int x, int y) {} }";
  };
  // Oracle: all 3! orders; a dependency-respecting order keeps the call after
  // both declarations.
  std::set<std::string> legal;
  std::vector<int> perm = {0, 1, 2};
  do {
    const auto pos = [&](int stmt) {
      return std::find(perm.begin(), perm.end(), stmt) - perm.begin();
    };
    if (pos(2) < pos(0) || pos(2) < pos(1)) continue;
    std::string body;
    for (size_t i = 0; i < perm.size(); ++i) body += (i ? " " : "") + stmts[perm[i]];
    legal.insert(wrap(body));
  } while (std::next_permutation(perm.begin(), perm.end()));
  ASSERT_EQ(legal.size(), 2u);

  const Snippet s = Java("R.java", wrap(decl_a + " " + decl_b + " " + use));
  std::set<std::string> seen;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    PerturbationOptions options;
    options.seed = seed;
    const auto r = ApplyPerturbation(s, PerturbationKind::kStatementOrderRandomization,
                                     options);
    ASSERT_TRUE(r.applicable);
    EXPECT_TRUE(legal.count(r.perturbed.source)) << r.perturbed.source;
    EXPECT_TRUE(ValidateSemanticsPreserved(s, r.perturbed,
                                           PerturbationKind::kStatementOrderRandomization)
                    .ok);
    ExpectMapIsPartialBijection(r.map, Texts(s).size(), Texts(r.perturbed).size());
    EXPECT_TRUE(r.map.unmatched_original.empty());
    seen.insert(r.perturbed.source);
  }
  EXPECT_EQ(seen.size(), 1u);  // the only legal non-identity order
  EXPECT_NE(*seen.begin(), s.source);
}

TEST(StatementReordering, DependentStatementsAreNotApplicable) {
  const Snippet s = Java("S.java", "class S { int m() { int a = 1; int b = a; return b; } }");
  const auto r = ApplyPerturbation(s, PerturbationKind::kStatementOrderRandomization);
  EXPECT_FALSE(r.applicable);
  EXPECT_EQ(r.perturbed.source, s.source);
}

TEST(Validator, DetectsNonBijectiveRenaming) {
  const Snippet original =
      Java("V.java", "class V { int m() { int a = 1; int b = 2; return a + b; } }");
  // Two distinct variables collapsed onto one name.
  const Snippet collapsed =
      Java("V.java", "class V { int m() { int v1 = 1; int v2 = 2; return v1 + v1; } }");
  const auto report = ValidateSemanticsPreserved(
      original, collapsed, PerturbationKind::kDeterministicIdentifierRenaming);
  EXPECT_FALSE(report.ok);
  EXPECT_FALSE(report.Describe().empty());
  const Snippet faithful =
      Java("V.java", "class V { int m() { int v1 = 1; int v2 = 2; return v1 + v2; } }");
  EXPECT_TRUE(ValidateSemanticsPreserved(original, faithful,
                                         PerturbationKind::kDeterministicIdentifierRenaming)
                  .ok);
}

TEST(Validator, DetectsAlteredNoOpInsertion) {
  const Snippet original = Java("N.java", "class N { void m() { int a = 1; a++; } }");
  const Snippet bad = Java("N.java", "class N { void m() { int a = 1; a++; a++; } }");
  EXPECT_FALSE(ValidateSemanticsPreserved(original, bad,
                                          PerturbationKind::kNoOpStatementInjection)
                   .ok);
}

TEST(CanonicalSubstitution, IsIdempotent) {
  for (const Snippet& s : DemoCorpus().snippets) {
    if (s.language != Language::kJava) continue;
    const auto once =
        ApplyPerturbation(s, PerturbationKind::kCanonicalIdentifierSubstitution);
    if (!once.applicable) continue;
    const auto twice = ApplyPerturbation(
        once.perturbed, PerturbationKind::kCanonicalIdentifierSubstitution);
    EXPECT_EQ(twice.perturbed.source, once.perturbed.source) << s.id;
  }
}

TEST(Perturb, DeterministicForFixedSeed) {
  for (PerturbationKind kind : kAllPerturbationKinds) {
    for (const Snippet& s : DemoCorpus().snippets) {
      if (!SupportsLanguage(kind, s.language)) continue;
      const auto a = ApplyPerturbation(s, kind);
      const auto b = ApplyPerturbation(s, kind);
      ASSERT_EQ(a.perturbed.source, b.perturbed.source) << PerturbationName(kind) << s.id;
      ASSERT_EQ(a.map, b.map);
    }
  }
}

TEST(Perturb, UnsupportedLanguageIsRejected) {
  const Snippet c{"p.c", Language::kC, "int main(void) { int a = 1; return a; }"};
  EXPECT_THROW(ApplyPerturbation(c, PerturbationKind::kSwitchToConditional),
               UnsupportedError);
  const Snippet java = Java("P.java", "class P { void m() { int a = 1; } }");
  EXPECT_THROW(ApplyPerturbation(java, PerturbationKind::kPointerIntroduction),
               UnsupportedError);
}

TEST(Perturb, NamesRoundTrip) {
  for (PerturbationKind kind : kAllPerturbationKinds) {
    EXPECT_EQ(PerturbationFromName(PerturbationName(kind)), kind);
  }
  EXPECT_EQ(PerturbationFromName("no-op_statement-injection"),
            PerturbationKind::kNoOpStatementInjection);
  EXPECT_EQ(PerturbationFromName("noop_statement_injection"),
            PerturbationKind::kNoOpStatementInjection);
  EXPECT_EQ(PerturbationFromName("Shuffle"), std::nullopt);
}

TEST(CorrespondenceJsonl, RoundTrips) {
  const Snippet s = Java("J.java", "class J { void m() { int a = 1; a++; } }");
  std::vector<std::pair<PerturbationResult, PerturbationKind>> results;
  results.emplace_back(ApplyPerturbation(s, PerturbationKind::kNoOpStatementInjection),
                       PerturbationKind::kNoOpStatementInjection);
  std::stringstream buffer;
  WriteCorrespondenceJsonl(buffer, results);
  const auto maps = ReadCorrespondenceJsonl(buffer);
  ASSERT_EQ(maps.size(), 1u);
  EXPECT_EQ(maps[0], results[0].first.map);
  EXPECT_EQ(maps[0].Inverted().Inverted(), maps[0]);
}

TEST(Renaming, TransferredActivationsGiveZeroCsi) {
  Corpus original;
  Corpus perturbed;
  std::vector<CorrespondenceMap> maps;
  for (const Snippet& s : DemoCorpus().snippets) {
    if (s.language != Language::kJava) continue;
    original.snippets.push_back(s);
    const auto r =
        ApplyPerturbation(s, PerturbationKind::kDeterministicIdentifierRenaming);
    perturbed.snippets.push_back(r.perturbed);
    maps.push_back(r.map);
  }
  StubOptions stub;
  stub.dim = 16;
  const auto before_tokens = TokenizeCorpus(original);
  const auto after_tokens = TokenizeCorpus(perturbed);
  const ActivationDataset before = StubActivations(before_tokens, stub);
  const ActivationDataset after = TransferActivations(before, after_tokens, maps, stub);
  DiscoveryConfig config;
  config.kmeans.k = 12;
  const StabilityReport report =
      MatchClusterings(Discover(before, config), Discover(after, config), &maps);
  EXPECT_EQ(report.csi, 0.0);
  EXPECT_EQ(report.average_jaccard, 1.0);
}

TEST(StubActivations, DeterministicAndSeedDependent) {
  Corpus corpus;
  corpus.snippets.push_back(
      Java("A.java", "class A { int m(int x) { return x + 1; } }"));
  const auto tokens = TokenizeCorpus(corpus);
  StubOptions options;
  options.dim = 8;
  const ActivationDataset a = StubActivations(tokens, options);
  EXPECT_EQ(a, StubActivations(tokens, options));
  EXPECT_EQ(a.size(), tokens[0].size());
  EXPECT_NO_THROW(ValidateDataset(a));
  options.seed = 7;
  EXPECT_NE(a.matrix, StubActivations(tokens, options).matrix);
}

TEST(StubActivations, TransferRequiresMaps) {
  Corpus corpus;
  corpus.snippets.push_back(Java("A.java", "class A { void m() { int a = 1; } }"));
  const auto tokens = TokenizeCorpus(corpus);
  const ActivationDataset a = StubActivations(tokens, {});
  EXPECT_THROW(TransferActivations(a, tokens, {}, {}), DataError);
  const auto r = ApplyPerturbation(corpus.snippets[0],
                                   PerturbationKind::kNoOpStatementInjection);
  Corpus after;
  after.snippets.push_back(r.perturbed);
  const auto after_tokens = TokenizeCorpus(after);
  const ActivationDataset b = TransferActivations(a, after_tokens, {r.map}, {});
  ASSERT_EQ(b.size(), after_tokens[0].size());
  for (const auto& [o, p] : r.map.pairs) {
    const auto row_a = a.Row(static_cast<size_t>(o));
    const auto row_b = b.Row(static_cast<size_t>(p));
    EXPECT_TRUE(std::equal(row_a.begin(), row_a.end(), row_b.begin()));
  }
}

}  // namespace
}  // namespace codeconcept
