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

#include "codeconcept/alignment.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

// ---- brute-force lexical checker -------------------------------------------

bool Lower(char c) { return c >= 'a' && c <= 'z'; }
bool Upper(char c) { return c >= 'A' && c <= 'Z'; }
bool Digit(char c) { return c >= '0' && c <= '9'; }
bool Alnum(char c) { return Lower(c) || Upper(c) || Digit(c); }

// lower+ then one or more (Upper [lower|digit]*) groups.
bool CamelByHand(const std::string& s) {
  size_t i = 0;
  while (i < s.size() && Lower(s[i])) ++i;
  if (i == 0 || i == s.size() || !Upper(s[i])) return false;
  for (; i < s.size(); ++i) {
    if (!Alnum(s[i])) return false;
  }
  return true;
}

// Upper, lower|digit at least once, then one or more groups as above.
bool PascalByHand(const std::string& s) {
  if (s.empty() || !Upper(s[0])) return false;
  size_t i = 1;
  while (i < s.size() && (Lower(s[i]) || Digit(s[i]))) ++i;
  if (i == 1 || i == s.size() || !Upper(s[i])) return false;
  for (; i < s.size(); ++i) {
    if (!Alnum(s[i])) return false;
  }
  return true;
}

struct Expected {
  std::map<LexicalPattern, std::string> witness;
};

bool Meets(size_t count, size_t n, int pct) {
  return count * 100 >= static_cast<size_t>(pct) * n;
}

Expected BruteForceLexical(const std::vector<std::string>& texts, int pct) {
  const std::set<std::string> distinct(texts.begin(), texts.end());
  const std::vector<std::string> words(distinct.begin(), distinct.end());
  const size_t n = words.size();
  Expected expected;
  if (n >= 2) {
    using Test = bool (*)(const std::string&, const std::string&);
    const std::tuple<LexicalPattern, size_t, Test> families[] = {
        {LexicalPattern::kSubstring, 4,
         [](const std::string& w, const std::string& c) {
           return w.find(c) != std::string::npos;
         }},
        {LexicalPattern::kPrefix, 1,
         [](const std::string& w, const std::string& c) {
           return w.size() >= c.size() && w.compare(0, c.size(), c) == 0;
         }},
        {LexicalPattern::kSuffix, 1,
         [](const std::string& w, const std::string& c) {
           return w.size() >= c.size() &&
                  w.compare(w.size() - c.size(), c.size(), c) == 0;
         }}};
    for (const auto& [pattern, min_len, test] : families) {
      std::set<std::string> candidates;
      for (const auto& w : words) {
        for (size_t a = 0; a < w.size(); ++a) {
          for (size_t b = a + min_len; b <= w.size(); ++b) {
            candidates.insert(w.substr(a, b - a));
          }
        }
      }
      std::string best;
      size_t best_count = 0;
      bool found = false;
      for (const auto& c : candidates) {  // lexicographic order
        size_t count = 0;
        for (const auto& w : words) count += test(w, c);
        if (!Meets(count, n, pct)) continue;
        if (!found || c.size() > best.size() ||
            (c.size() == best.size() && count > best_count)) {
          best = c;
          best_count = count;
          found = true;
        }
      }
      if (found) expected.witness[pattern] = best;
    }
  }
  size_t camel = 0;
  size_t pascal = 0;
  for (const auto& w : words) {
    camel += CamelByHand(w);
    pascal += PascalByHand(w);
  }
  if (Meets(camel, n, pct)) expected.witness[LexicalPattern::kCamelCase] = "";
  if (Meets(pascal, n, pct)) expected.witness[LexicalPattern::kPascalCase] = "";
  return expected;
}

std::map<LexicalPattern, std::string> Detected(
    const std::vector<std::string>& texts, double threshold) {
  std::map<LexicalPattern, std::string> out;
  for (const auto& m : DetectLexicalPatterns(texts, threshold)) {
    out[m.pattern] = m.witness;
  }
  return out;
}

TEST(Lexical, VariableNamesEndingInOne) {
  const auto found = Detected({"tab1", "sum1", "ans1"}, 0.8);
  ASSERT_TRUE(found.contains(LexicalPattern::kSuffix));
  EXPECT_EQ(found.at(LexicalPattern::kSuffix), "1");
  EXPECT_FALSE(found.contains(LexicalPattern::kPrefix));
  EXPECT_FALSE(found.contains(LexicalPattern::kSubstring));
}

TEST(Lexical, CamelCasing) {
  const auto found = Detected({"myVariable", "getCount", "isDone"}, 0.8);
  EXPECT_TRUE(found.contains(LexicalPattern::kCamelCase));
  EXPECT_FALSE(found.contains(LexicalPattern::kPascalCase));
}

TEST(Lexical, PrefixBelowThresholdIsNotDetected) {
  const auto found = Detected({"preload", "preset", "prefix", "apple"}, 0.8);
  EXPECT_FALSE(found.contains(LexicalPattern::kPrefix));
  EXPECT_EQ(Detected({"preload", "preset", "prefix", "apple"}, 0.75)
                .at(LexicalPattern::kPrefix),
            "pre");
}

TEST(Lexical, CasingDefinitionsAreExclusive) {
  for (const char* camel : {"myVariable", "aB", "xY2", "getHTTPResponse"}) {
    EXPECT_TRUE(IsCamelCase(camel)) << camel;
    EXPECT_FALSE(IsPascalCase(camel)) << camel;
  }
  for (const char* pascal : {"StringBuilder", "Ab1Cd", "HashMap"}) {
    EXPECT_TRUE(IsPascalCase(pascal)) << pascal;
    EXPECT_FALSE(IsCamelCase(pascal)) << pascal;
  }
  for (const char* neither : {"snake_case", "x", "X", "URL", "Ab", "a1B", "1aB"}) {
    EXPECT_FALSE(IsCamelCase(neither)) << neither;
    EXPECT_FALSE(IsPascalCase(neither)) << neither;
  }
}

TEST(Lexical, DuplicatesDoNotChangeDetection) {
  const std::vector<std::string> once = {"bufferA", "bufferB", "other"};
  std::vector<std::string> twice = once;
  twice.insert(twice.end(), once.begin(), once.end());
  twice.push_back("bufferA");
  EXPECT_EQ(Detected(once, 0.6), Detected(twice, 0.6));
}

TEST(Lexical, RandomClustersMatchBruteForce) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> heads = {"get", "set", "is", "", "tmp", "x"};
  const std::vector<std::string> stems = {"Count", "value", "Name",  "data",
                                          "Item",  "1",     "Buffer", "_len"};
  const std::vector<std::string> tails = {"", "1", "s", "Buffer", "Map", "2"};
  const int percents[] = {50, 60, 75, 80, 90, 100};
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
  };
  for (int trial = 0; trial < 100; ++trial) {
    const size_t size = std::uniform_int_distribution<size_t>(1, 9)(rng);
    std::vector<std::string> texts;
    for (size_t i = 0; i < size; ++i) {
      std::string w = pick(heads) + pick(stems) + pick(tails);
      texts.push_back(w);
    }
    const int pct = percents[trial % 6];
    const auto expected = BruteForceLexical(texts, pct);
    EXPECT_EQ(Detected(texts, pct / 100.0), expected.witness)
        << "trial " << trial << " pct " << pct;
  }
}

// ---- alignment ---------------------------------------------------------------

struct Instance {
  std::vector<Cluster> clusters;
  SyntacticLabeling labeling;
};

Instance MakeInstance(const std::vector<std::vector<std::string>>& tags_per_cluster,
                      std::set<std::string> extra_vocab = {}) {
  Instance inst;
  int next = 0;
  for (size_t c = 0; c < tags_per_cluster.size(); ++c) {
    Cluster cluster{static_cast<int>(c), {}};
    for (const auto& tag : tags_per_cluster[c]) {
      InstanceId id{"s.java", next++};
      cluster.members.push_back(id);
      inst.labeling.tags[id] = tag;
      inst.labeling.tag_vocabulary.insert(tag);
    }
    inst.clusters.push_back(cluster);
  }
  inst.labeling.tag_vocabulary.insert(extra_vocab.begin(), extra_vocab.end());
  return inst;
}

TEST(AlignCluster, PureClusterAlignsAtOne) {
  const Instance inst = MakeInstance({{"identifier", "identifier", "identifier"}});
  const auto a = AlignCluster(inst.clusters[0].members, inst.labeling, 1.0);
  EXPECT_TRUE(a.aligned);
  EXPECT_EQ(a.tag, "identifier");
  EXPECT_DOUBLE_EQ(a.fraction, 1.0);
}

TEST(AlignCluster, NineOfTenAlignsAtNinetyOnly) {
  std::vector<std::string> tags(9, "identifier");
  tags.push_back("string_literal");
  const Instance inst = MakeInstance({tags});
  EXPECT_TRUE(AlignCluster(inst.clusters[0].members, inst.labeling, 0.90).aligned);
  EXPECT_FALSE(AlignCluster(inst.clusters[0].members, inst.labeling, 0.95).aligned);
}

TEST(AlignCluster, TiesGoToLexicographicallySmallerTag) {
  const Instance inst = MakeInstance({{"zeta", "alpha", "zeta", "alpha"}});
  EXPECT_EQ(AlignCluster(inst.clusters[0].members, inst.labeling, 0.5).tag, "alpha");
}

TEST(AlignCluster, UnlabeledMemberIsAnError) {
  Instance inst = MakeInstance({{"a", "b"}});
  inst.clusters[0].members.push_back({"other.java", 0});
  EXPECT_THROW(AlignCluster(inst.clusters[0].members, inst.labeling, 0.9), DataError);
}

TEST(Coverage, Examples) {
  // "t" is 1 of 10 members in each cluster.
  std::vector<std::vector<std::string>> thin(3, std::vector<std::string>(9, "u"));
  for (auto& c : thin) c.push_back("t");
  thin.push_back({"p", "p"});
  const Instance inst = MakeInstance(thin, {"never"});
  EXPECT_FALSE(Coverage("t", inst.clusters, inst.labeling, 0.85));
  EXPECT_TRUE(Coverage("p", inst.clusters, inst.labeling, 1.0));
  EXPECT_FALSE(Coverage("never", inst.clusters, inst.labeling, 0.0));
  EXPECT_THROW(Coverage("unknown", inst.clusters, inst.labeling, 0.9), DataError);
}

TEST(AlignmentReport, HandComputedScore) {
  std::vector<std::string> mixed(5, "a");
  mixed.insert(mixed.end(), 5, "b");
  const Instance inst = MakeInstance({std::vector<std::string>(10, "a"), mixed});
  const auto report = BuildAlignmentReport(inst.clusters, inst.labeling, {0.9});
  ASSERT_EQ(report.per_threshold.size(), 1u);
  const auto& m = report.per_threshold[0];
  EXPECT_EQ(m.clusters_labeled, 1u);
  EXPECT_EQ(m.unaligned_clusters, 1u);
  EXPECT_DOUBLE_EQ(m.overall_alignment_score, 0.75);
}

TEST(AlignmentReport, AllPureClusters) {
  const Instance inst = MakeInstance({{"a", "a"}, {"b"}, {"c", "c", "c"}});
  const auto report = BuildAlignmentReport(inst.clusters, inst.labeling, {0.85, 0.9});
  for (const auto& m : report.per_threshold) {
    EXPECT_EQ(m.clusters_labeled, 3u);
    EXPECT_EQ(m.unaligned_clusters, 0u);
    EXPECT_DOUBLE_EQ(m.overall_alignment_score, 1.0);
    EXPECT_DOUBLE_EQ(m.tag_coverage_pct, 100.0);
  }
}

TEST(AlignmentReport, CoverageRatioMatchesHandCount) {
  // 36 of 72 tags covered gives 50%, 49 of 72 gives 68.06%.
  std::vector<std::vector<std::string>> clusters;
  std::set<std::string> vocab;
  for (int i = 0; i < 72; ++i) vocab.insert("tag" + std::to_string(i));
  for (int i = 0; i < 49; ++i) clusters.push_back({"tag" + std::to_string(i)});
  const Instance inst = MakeInstance(clusters, vocab);
  const auto report = BuildAlignmentReport(inst.clusters, inst.labeling, {0.9});
  EXPECT_EQ(report.per_threshold[0].unique_tags, 49u);
  EXPECT_NEAR(report.per_threshold[0].tag_coverage_pct, 68.06, 0.005);
  clusters.resize(36);
  const Instance half = MakeInstance(clusters, vocab);
  EXPECT_DOUBLE_EQ(
      BuildAlignmentReport(half.clusters, half.labeling, {0.9}).per_threshold[0].tag_coverage_pct,
      50.0);
}

TEST(AlignmentReport, RandomInstancesMatchBruteForce) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> all_tags = {"a", "b", "c", "d"};
  const int percents[] = {85, 90, 95};
  for (int trial = 0; trial < 200; ++trial) {
    const size_t k = std::uniform_int_distribution<size_t>(1, 5)(rng);
    const size_t used_tags = std::uniform_int_distribution<size_t>(1, 4)(rng);
    size_t budget = std::uniform_int_distribution<size_t>(k, 30)(rng);
    std::vector<std::vector<std::string>> clusters(k);
    std::uniform_int_distribution<size_t> tag_pick(0, used_tags - 1);
    for (size_t c = 0; c < k; ++c) clusters[c].push_back(all_tags[tag_pick(rng)]);
    budget -= k;
    std::uniform_int_distribution<size_t> cluster_pick(0, k - 1);
    // Skew: half the extra tokens copy the cluster's first tag.
    for (; budget > 0; --budget) {
      const size_t c = cluster_pick(rng);
      clusters[c].push_back(rng() % 2 ? clusters[c][0] : all_tags[tag_pick(rng)]);
    }
    const std::set<std::string> vocab(all_tags.begin(), all_tags.end());
    const Instance inst = MakeInstance(clusters, vocab);
    const auto report = BuildAlignmentReport(
        inst.clusters, inst.labeling, {0.85, 0.90, 0.95});

    // Exhaustive overlap counting.
    size_t total = 0;
    size_t best_sum = 0;
    std::vector<std::map<std::string, size_t>> counts(k);
    std::vector<std::string> best_tag(k);
    std::vector<size_t> best_count(k, 0);
    for (size_t c = 0; c < k; ++c) {
      for (const auto& t : clusters[c]) ++counts[c][t];
      for (const auto& t : all_tags) {  // sorted, so '>' keeps the smaller tag
        if (counts[c][t] > best_count[c]) {
          best_count[c] = counts[c][t];
          best_tag[c] = t;
        }
      }
      total += clusters[c].size();
      best_sum += best_count[c];
    }
    ASSERT_EQ(report.total_clusters, k);
    ASSERT_EQ(report.vocabulary_size, 4u);
    for (size_t c = 0; c < k; ++c) {
      EXPECT_EQ(report.clusters[c].tag, best_tag[c]);
      EXPECT_EQ(report.clusters[c].overlap, best_count[c]);
      EXPECT_EQ(report.clusters[c].size, clusters[c].size());
    }
    for (size_t t = 0; t < 3; ++t) {
      const int pct = percents[t];
      const auto& m = report.per_threshold[t];
      size_t labeled = 0;
      for (size_t c = 0; c < k; ++c) {
        const bool alpha = best_count[c] * 100 >= static_cast<size_t>(pct) * clusters[c].size();
        labeled += alpha;
        EXPECT_EQ(AlignCluster(inst.clusters[c].members, inst.labeling, pct / 100.0).aligned,
                  alpha);
      }
      std::vector<std::string> covered;
      for (const auto& tag : all_tags) {
        bool kappa = false;
        for (size_t c = 0; c < k; ++c) {
          const size_t n = counts[c][tag];
          kappa |= n > 0 && n * 100 >= static_cast<size_t>(pct) * clusters[c].size();
        }
        EXPECT_EQ(Coverage(tag, inst.clusters, inst.labeling, pct / 100.0), kappa);
        if (kappa) covered.push_back(tag);
      }
      EXPECT_EQ(m.clusters_labeled, labeled) << "trial " << trial;
      EXPECT_EQ(m.unaligned_clusters, k - labeled);
      EXPECT_EQ(m.clusters_labeled + m.unaligned_clusters, k);
      EXPECT_EQ(m.unique_tags, covered.size());
      EXPECT_EQ(m.covered_tags, covered);
      EXPECT_EQ(m.tag_coverage_pct, 100.0 * static_cast<double>(covered.size()) / 4.0);
      EXPECT_EQ(m.tag_coverage_pct,
                100.0 * static_cast<double>(m.unique_tags) /
                    static_cast<double>(report.vocabulary_size));
      EXPECT_EQ(m.overall_alignment_score,
                static_cast<double>(best_sum) / static_cast<double>(total));
    }
    // Monotone in theta.
    for (size_t t = 1; t < 3; ++t) {
      EXPECT_LE(report.per_threshold[t].clusters_labeled,
                report.per_threshold[t - 1].clusters_labeled);
      EXPECT_LE(report.per_threshold[t].unique_tags,
                report.per_threshold[t - 1].unique_tags);
    }
  }
}

TEST(AlignmentReport, TablesHaveOneColumnPerThreshold) {
  const Instance inst = MakeInstance({{"a", "a"}, {"a", "b"}});
  const auto report = BuildAlignmentReport(inst.clusters, inst.labeling, {0.85, 0.9, 0.95});
  const std::string md = AlignmentMarkdown(report);
  EXPECT_NE(md.find("| 85% | 90% | 95% |"), std::string::npos) << md;
  EXPECT_NE(md.find("Clusters Labeled"), std::string::npos);
  const std::string csv = AlignmentCsv(report);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

}  // namespace
}  // namespace codeconcept
