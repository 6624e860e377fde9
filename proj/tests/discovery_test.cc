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

#include "codeconcept/discovery.h"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

// Adjusted Rand index from the contingency table.
double AdjustedRand(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto choose2 = [](double n) { return n * (n - 1) / 2; };
  double index = 0;
  for (const auto& [key, n] : table) index += choose2(n);
  double sum_rows = 0;
  for (const auto& [key, n] : rows) sum_rows += choose2(n);
  double sum_cols = 0;
  for (const auto& [key, n] : cols) sum_cols += choose2(n);
  const double expected = sum_rows * sum_cols / choose2(static_cast<double>(a.size()));
  const double max_index = (sum_rows + sum_cols) / 2;
  return (index - expected) / (max_index - expected);
}

// SSE of an assignment with centroids recomputed as member means.
double PartitionSse(const std::vector<float>& data, size_t dim,
                    const std::vector<int>& assignment, int k) {
  std::vector<double> sums(static_cast<size_t>(k) * dim, 0.0);
  std::vector<double> counts(static_cast<size_t>(k), 0.0);
  for (size_t i = 0; i < assignment.size(); ++i) {
    counts[static_cast<size_t>(assignment[i])] += 1;
    for (size_t j = 0; j < dim; ++j) {
      sums[static_cast<size_t>(assignment[i]) * dim + j] += data[i * dim + j];
    }
  }
  double sse = 0;
  for (size_t i = 0; i < assignment.size(); ++i) {
    const size_t c = static_cast<size_t>(assignment[i]);
    for (size_t j = 0; j < dim; ++j) {
      const double d = data[i * dim + j] - sums[c * dim + j] / counts[c];
      sse += d * d;
    }
  }
  return sse;
}

// Minimum SSE over every assignment of n points to at most k labels.
double ExhaustiveBestSse(const std::vector<float>& data, size_t n, size_t dim,
                         int k) {
  std::vector<int> assignment(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, PartitionSse(data, dim, assignment, k));
    size_t i = 0;
    while (i < n && ++assignment[i] == k) assignment[i++] = 0;
    if (i == n) break;
  }
  return best;
}

struct Blobs {
  std::vector<float> data;
  std::vector<int> truth;
};

Blobs FourBlobs(size_t n, size_t dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  Blobs blobs;
  for (size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 4);
    for (size_t j = 0; j < dim; ++j) {
      const float center = (j % 4 == static_cast<size_t>(label)) ? 20.0f : 0.0f;
      blobs.data.push_back(center + noise(rng));
    }
    blobs.truth.push_back(label);
  }
  return blobs;
}

TEST(KMeans, FourGaussianBlobs) {
  const Blobs blobs = FourBlobs(200, 8, 11);
  KMeansOptions options;
  options.k = 4;
  const auto start = std::chrono::steady_clock::now();
  const KMeansResult result = KMeans(blobs.data, 200, 8, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(AdjustedRand(result.assignment, blobs.truth), 0.99);
  EXPECT_LT(seconds, 5.0);
  for (size_t i = 1; i < result.sse_history.size(); ++i) {
    EXPECT_LE(result.sse_history[i], result.sse_history[i - 1]) << "iteration " << i;
  }
}

TEST(KMeans, SseNeverIncreasesOnRandomData) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> data(300 * 5);
    for (auto& v : data) v = u(rng);
    KMeansOptions options;
    options.k = 12;
    options.seed = static_cast<uint64_t>(trial);
    const auto result = KMeans(data, 300, 5, options);
    for (size_t i = 1; i < result.sse_history.size(); ++i) {
      ASSERT_LE(result.sse_history[i], result.sse_history[i - 1] * (1 + 1e-12))
          << "trial " << trial << " iteration " << i;
    }
  }
}

TEST(KMeans, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(9);
  std::normal_distribution<float> normal;
  const size_t n = 5000;
  const size_t dim = 16;
  std::vector<float> data(n * dim);
  for (auto& v : data) v = normal(rng);
  KMeansOptions options;
  options.k = 25;
  options.max_iter = 50;
  options.num_threads = 1;
  const auto one = KMeans(data, n, dim, options);
  options.num_threads = 8;
  const auto eight = KMeans(data, n, dim, options);
  EXPECT_EQ(one.assignment, eight.assignment);
  EXPECT_EQ(one.centroids, eight.centroids);
  EXPECT_EQ(one.sse_history, eight.sse_history);
}

TEST(KMeans, HandExampleMatchesExhaustiveOptimum) {
  const std::vector<float> data = {0, 0, 0, 1, 10, 0, 10, 1};
  KMeansOptions options;
  options.k = 2;
  const auto result = KMeans(data, 4, 2, options);
  EXPECT_EQ(result.assignment[0], result.assignment[1]);
  EXPECT_EQ(result.assignment[2], result.assignment[3]);
  EXPECT_NE(result.assignment[0], result.assignment[2]);
  const size_t left = static_cast<size_t>(result.assignment[0]);
  const size_t right = static_cast<size_t>(result.assignment[2]);
  EXPECT_DOUBLE_EQ(result.centroids[left * 2], 0.0);
  EXPECT_DOUBLE_EQ(result.centroids[left * 2 + 1], 0.5);
  EXPECT_DOUBLE_EQ(result.centroids[right * 2], 10.0);
  EXPECT_DOUBLE_EQ(result.centroids[right * 2 + 1], 0.5);
  EXPECT_DOUBLE_EQ(result.sse(), ExhaustiveBestSse(data, 4, 2, 2));
  EXPECT_DOUBLE_EQ(result.sse(), 1.0);
}

TEST(KMeans, KEqualsNGivesZeroObjective) {
  const std::vector<float> data = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  KMeansOptions options;
  options.k = 3;
  const auto result = KMeans(data, 3, 3, options);
  EXPECT_EQ(std::set<int>(result.assignment.begin(), result.assignment.end()).size(), 3u);
  EXPECT_DOUBLE_EQ(result.sse(), 0.0);
}

TEST(KMeans, BestOfRestartsReachesExhaustiveOptimum) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<float> u(0, 10);
  std::uniform_int_distribution<int> n_dist(4, 10);
  std::uniform_int_distribution<int> k_dist(1, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = static_cast<size_t>(n_dist(rng));
    const int k = k_dist(rng);
    std::vector<float> data(n * 2);
    for (auto& v : data) v = u(rng);
    double best = std::numeric_limits<double>::infinity();
    for (uint64_t seed = 0; seed < 20; ++seed) {
      KMeansOptions options;
      options.k = k;
      options.seed = seed;
      const auto result = KMeans(data, n, 2, options);
      best = std::min(best, PartitionSse(data, 2, result.assignment, k));
    }
    EXPECT_NEAR(best, ExhaustiveBestSse(data, n, 2, k), 1e-9)
        << "trial " << trial << " n=" << n << " k=" << k;
  }
}

TEST(KMeans, RejectsBadInput) {
  const std::vector<float> data = {0, 1, 2};
  KMeansOptions options;
  options.k = 4;
  EXPECT_THROW(KMeans(data, 3, 1, options), DataError);
  options.k = 0;
  EXPECT_THROW(KMeans(data, 3, 1, options), DataError);
  options.k = 2;
  const std::vector<float> bad = {0, std::nanf(""), 2};
  EXPECT_THROW(KMeans(bad, 3, 1, options), DataError);
}

ActivationDataset Dataset(const std::vector<std::string>& texts, size_t dim,
                          uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  ActivationDataset d;
  d.manifest.dim = static_cast<int64_t>(dim);
  d.manifest.count = static_cast<int64_t>(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    d.rows.push_back({"s.java", static_cast<int32_t>(i), texts[i]});
    for (size_t j = 0; j < dim; ++j) d.matrix.push_back(normal(rng));
  }
  return d;
}

TEST(FilterVocabulary, RemovesEveryRowOfAFrequentType) {
  const auto d = Dataset({"x", "y", "x", "z", "x", "y"}, 2, 1);
  const VocabularyFilter f = FilterVocabulary(d, 2);
  EXPECT_EQ(f.retained_rows, (std::vector<size_t>{1, 3, 5}));
  EXPECT_EQ(f.removed_rows, 3);
  ASSERT_EQ(f.removed_types.size(), 1u);
  EXPECT_EQ(f.removed_types[0], (std::pair<std::string, int64_t>{"x", 3}));
  EXPECT_EQ(FilterVocabulary(d, 100).retained_rows.size(), 6u);
}

TEST(PruneClusters, OnlyOversizeClusterMoves) {
  ClusterSet cs;
  cs.k = 3;
  for (int id = 0; id < 3; ++id) {
    Cluster c{id, {}};
    const int size = id == 1 ? 20000 : 100;
    for (int i = 0; i < size; ++i) c.members.push_back({"s" + std::to_string(id), i});
    cs.clusters.push_back(c);
  }
  const ClusterSet same = PruneClusters(cs, 20000);
  EXPECT_EQ(same.clusters, cs.clusters);
  EXPECT_TRUE(same.pruned.empty());
  const ClusterSet pruned = PruneClusters(cs, 15000);
  ASSERT_EQ(pruned.pruned.size(), 1u);
  EXPECT_EQ(pruned.pruned[0].id, 1);
  ASSERT_EQ(pruned.clusters.size(), 2u);
  EXPECT_EQ(pruned.clusters[0].id, 0);
  EXPECT_EQ(pruned.clusters[1].id, 2);
}

TEST(Discover, PartitionsRetainedRowsAndRoundTrips) {
  std::vector<std::string> texts;
  for (int i = 0; i < 400; ++i) texts.push_back("t" + std::to_string(i % 37));
  texts.push_back("rare");
  const auto d = Dataset(texts, 6, 4);
  DiscoveryConfig config;
  config.kmeans.k = 8;
  config.max_token_freq = 10;  // t0..t29 occur 11 times each and are dropped
  config.max_cluster_size = 20;
  const ClusterSet cs = Discover(d, config, "manifest.json");
  const VocabularyFilter f = FilterVocabulary(d, 10);
  EXPECT_EQ(f.retained_rows.size(), 71u);

  std::set<InstanceId> seen;
  for (const auto* list : {&cs.clusters, &cs.pruned}) {
    for (const auto& c : *list) {
      for (const auto& m : c.members) EXPECT_TRUE(seen.insert(m).second);
    }
  }
  std::set<InstanceId> expected;
  for (size_t row : f.retained_rows) {
    expected.insert({d.rows[row].snippet_id, d.rows[row].token_idx});
  }
  EXPECT_EQ(seen, expected);
  EXPECT_EQ(cs.retained_rows, static_cast<int64_t>(expected.size()));
  for (const auto& c : cs.clusters) EXPECT_LE(c.size(), 20u);
  for (const auto& c : cs.pruned) EXPECT_GT(c.size(), 20u);

  const ClusterSet back = ClusterSetFromJson(ClusterSetToJson(cs));
  EXPECT_EQ(back.clusters, cs.clusters);
  EXPECT_EQ(back.pruned, cs.pruned);
  EXPECT_EQ(back.k, cs.k);
  EXPECT_EQ(back.source_manifest, "manifest.json");
  EXPECT_EQ(ClusterSetToJson(back), ClusterSetToJson(cs));
  ASSERT_EQ(back.centroids.size(), cs.centroids.size());
  for (size_t i = 0; i < cs.centroids.size(); ++i) {
    // Centroids are stored as float32.
    EXPECT_EQ(back.centroids[i], static_cast<double>(static_cast<float>(cs.centroids[i])));
  }
}

TEST(Discover, MembersAreNearestToTheirCentroidAtConvergence) {
  const Blobs blobs = FourBlobs(400, 4, 2);
  ActivationDataset d;
  d.manifest.dim = 4;
  d.manifest.count = 400;
  for (int i = 0; i < 400; ++i) d.rows.push_back({"s", i, "w" + std::to_string(i)});
  d.matrix = blobs.data;
  DiscoveryConfig config;
  config.kmeans.k = 6;
  const ClusterSet cs = Discover(d, config);
  ASSERT_TRUE(cs.converged);
  for (const auto& c : cs.clusters) {
    for (const auto& m : c.members) {
      const size_t row = static_cast<size_t>(m.token_idx);
      double best = std::numeric_limits<double>::infinity();
      int best_id = -1;
      for (int id = 0; id < cs.k; ++id) {
        double dist = 0;
        for (size_t j = 0; j < 4; ++j) {
          const double diff = d.matrix[row * 4 + j] - cs.centroids[static_cast<size_t>(id) * 4 + j];
          dist += diff * diff;
        }
        if (dist < best) {
          best = dist;
          best_id = id;
        }
      }
      EXPECT_EQ(best_id, c.id) << "row " << row;
    }
  }
}

}  // namespace
}  // namespace codeconcept
