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

#include "codeconcept/robustness.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "codeconcept/errors.h"
#include "json.hpp"

namespace codeconcept {
namespace {

InstanceId I(int idx, const std::string& snippet = "s") { return {snippet, idx}; }

InstanceSet Set(std::initializer_list<int> ids) {
  InstanceSet s;
  for (int id : ids) s.insert(I(id));
  return s;
}

ClusterSet Clusters(const std::vector<std::vector<InstanceId>>& groups) {
  ClusterSet cs;
  cs.k = static_cast<int>(groups.size());
  for (size_t i = 0; i < groups.size(); ++i) {
    Cluster c{static_cast<int>(i), groups[i]};
    std::sort(c.members.begin(), c.members.end());
    cs.clusters.push_back(c);
  }
  return cs;
}

// Maximum of sum_i w[i][perm[i]] over all permutations.
double BruteForceBest(const std::vector<double>& w, size_t n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1;
  do {
    double total = 0;
    for (size_t i = 0; i < n; ++i) total += w[i * n + static_cast<size_t>(perm[i])];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double JaccardByCount(const InstanceSet& a, const InstanceSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t shared = 0;
  for (const auto& x : a) shared += b.count(x);
  return static_cast<double>(shared) /
         static_cast<double>(a.size() + b.size() - shared);
}

TEST(Jaccard, Examples) {
  EXPECT_EQ(Jaccard(Set({1, 2}), Set({1, 2})), 1.0);
  EXPECT_EQ(Jaccard(Set({1, 2}), Set({3})), 0.0);
  EXPECT_DOUBLE_EQ(Jaccard(Set({1, 2}), Set({2, 3})), 1.0 / 3.0);
  EXPECT_EQ(Jaccard(Set({}), Set({})), 1.0);
}

TEST(MatchClusterings, IdentityIsExactlyZero) {
  const ClusterSet cs = Clusters({{I(0), I(1), I(2)}, {I(3)}, {I(4), I(5)}});
  const StabilityReport report = MatchClusterings(cs, cs);
  EXPECT_EQ(report.average_jaccard, 1.0);
  EXPECT_EQ(report.csi, 0.0);
}

TEST(MatchClusterings, DisjointIsOne) {
  const std::vector<InstanceSet> before = {Set({0, 1}), Set({2})};
  const std::vector<InstanceSet> after = {Set({10}), Set({11, 12})};
  const StabilityReport report = MatchClusterings(before, after);
  EXPECT_EQ(report.average_jaccard, 0.0);
  EXPECT_EQ(report.csi, 1.0);
}

TEST(MatchClusterings, WorkedTwoClusterExample) {
  // a=0, b=1, c=2. C = {{a,b},{c}}, C' = {{a},{b,c}}.
  const ClusterSet before = Clusters({{I(0), I(1)}, {I(2)}});
  const ClusterSet after = Clusters({{I(0)}, {I(1), I(2)}});
  const StabilityReport report = MatchClusterings(before, after);
  EXPECT_NEAR(report.average_jaccard, 0.5, 1e-12);
  EXPECT_NEAR(report.csi, 0.5, 1e-12);
  ASSERT_EQ(report.matching.size(), 2u);
  EXPECT_EQ(report.matching[0].after_id, 0);
  EXPECT_EQ(report.matching[1].after_id, 1);
  // The other bijection scores 1/3 + 0.
  EXPECT_NEAR(JaccardByCount(Set({0, 1}), Set({1, 2})) +
                  JaccardByCount(Set({2}), Set({0})),
              1.0 / 3.0, 1e-12);
}

TEST(MatchClusterings, UnequalCountsArePadded) {
  const std::vector<InstanceSet> before = {Set({0, 1}), Set({2}), Set({3})};
  const std::vector<InstanceSet> after = {Set({0, 1, 2, 3})};
  const StabilityReport report = MatchClusterings(before, after);
  EXPECT_EQ(report.k, 3u);
  EXPECT_NEAR(report.average_jaccard, 0.5 / 3.0, 1e-12);
  size_t padded = 0;
  for (const auto& pair : report.matching) padded += !pair.after_id.has_value();
  EXPECT_EQ(padded, 2u);
}

TEST(MaxWeightAssignment, MatchesPermutationSearch) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<size_t> k_dist(1, 7);
  for (int trial = 0; trial < 500; ++trial) {
    const size_t k_before = k_dist(rng);
    const size_t k_after = k_dist(rng);
    const int universe = std::uniform_int_distribution<int>(1, 25)(rng);
    std::vector<InstanceSet> before(k_before);
    std::vector<InstanceSet> after(k_after);
    for (int x = 0; x < universe; ++x) {
      before[rng() % k_before].insert(I(x));
      after[rng() % k_after].insert(I(x));
    }
    const size_t k = std::max(k_before, k_after);
    std::vector<double> w(k * k, 0.0);
    for (size_t i = 0; i < k_before; ++i) {
      for (size_t j = 0; j < k_after; ++j) w[i * k + j] = JaccardByCount(before[i], after[j]);
    }
    const double best = BruteForceBest(w, k);
    const StabilityReport report = MatchClusterings(before, after);
    ASSERT_NEAR(report.average_jaccard * static_cast<double>(k), best, 1e-12)
        << "trial " << trial;
    EXPECT_NEAR(report.csi, 1.0 - report.average_jaccard, 0.0);
    EXPECT_GE(report.csi, 0.0);
    EXPECT_LE(report.csi, 1.0);
    // The reported matching is a bijection.
    std::vector<int> assignment = MaxWeightAssignment(w, k);
    std::vector<int> sorted = assignment;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < k; ++i) ASSERT_EQ(sorted[i], static_cast<int>(i));
  }
}

TEST(MatchClusterings, CorrespondenceTranslatesPerturbedInstances) {
  // Perturbed snippet inserted a token at index 1; original 1,2 -> 2,3.
  CorrespondenceMap map{"s", "s", {{0, 0}, {1, 2}, {2, 3}}, {}, {1}};
  const ClusterSet before = Clusters({{I(0), I(1)}, {I(2)}});
  const ClusterSet after = Clusters({{I(0), I(2)}, {I(3), I(1)}});
  const std::vector<CorrespondenceMap> maps = {map};
  const StabilityReport forward = MatchClusterings(before, after, &maps);
  // {a,b} vs {a,b} = 1; {c} vs {c, new} = 1/2.
  EXPECT_NEAR(forward.average_jaccard, 0.75, 1e-12);
  const std::vector<CorrespondenceMap> inverse = {map.Inverted()};
  const StabilityReport backward = MatchClusterings(after, before, &inverse);
  EXPECT_NEAR(backward.csi, forward.csi, 1e-12);
}

TEST(MatchClusterings, SymmetricUnderInvertedMapOnRandomInstances) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 20)(rng);
    // Drop one original token and add one perturbed token.
    CorrespondenceMap map{"s", "s", {}, {0}, {}};
    for (int i = 1; i < n; ++i) map.pairs.push_back({i, i + 1});
    map.unmatched_perturbed.push_back(0);
    const size_t k = 3;
    std::vector<std::vector<InstanceId>> a(k);
    std::vector<std::vector<InstanceId>> b(k);
    for (int i = 0; i < n; ++i) a[rng() % k].push_back(I(i));
    for (int i = 0; i <= n; ++i) b[rng() % k].push_back(I(i));
    const ClusterSet before = Clusters(a);
    const ClusterSet after = Clusters(b);
    const std::vector<CorrespondenceMap> forward = {map};
    const std::vector<CorrespondenceMap> backward = {map.Inverted()};
    EXPECT_NEAR(MatchClusterings(before, after, &forward).csi,
                MatchClusterings(after, before, &backward).csi, 1e-12)
        << "trial " << trial;
  }
}

TEST(MatchClusterings, MismatchedUniverseWithoutMapNamesSnippet) {
  const ClusterSet before = Clusters({{I(0, "a.java"), I(1, "a.java")}});
  const ClusterSet after = Clusters({{I(0, "a.java"), I(1, "a.java"), I(2, "a.java")}});
  try {
    MatchClusterings(before, after);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("a.java"), std::string::npos);
  }
}

TEST(MatchClusterings, MissingMapNamesSnippet) {
  const ClusterSet before = Clusters({{I(0, "a.java")}});
  const ClusterSet after = Clusters({{I(0, "b.java")}});
  const std::vector<CorrespondenceMap> maps = {{"a.java", "a.java", {{0, 0}}, {}, {}}};
  try {
    MatchClusterings(before, after, &maps);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("b.java"), std::string::npos);
  }
}

TEST(StabilityReportJson, HasBothColumns) {
  const ClusterSet cs = Clusters({{I(0)}, {I(1)}});
  const auto j = nlohmann::json::parse(StabilityReportJson(MatchClusterings(cs, cs), "x"));
  EXPECT_EQ(j.at("perturbation"), "x");
  EXPECT_EQ(j.at("Average Jaccard").get<double>(), 1.0);
  EXPECT_EQ(j.at("CSI").get<double>(), 0.0);
}

}  // namespace
}  // namespace codeconcept
