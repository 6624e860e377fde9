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

#ifndef CODECONCEPT_DISCOVERY_H_
#define CODECONCEPT_DISCOVERY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "codeconcept/activation_io.h"
#include "codeconcept/corpus.h"

namespace codeconcept {

struct KMeansOptions {
  int k = 350;
  uint64_t seed = 42;
  int max_iter = 300;
  double tol = 1e-4;  // stop once every centroid moves less than this (L2)
  int num_threads = 1;
};

struct DiscoveryConfig {
  KMeansOptions kmeans;
  int64_t max_token_freq = 15000;
  int64_t max_cluster_size = 15000;
};

struct KMeansResult {
  std::vector<int> assignment;    // cluster per input row
  std::vector<double> centroids;  // k x dim, row-major
  std::vector<double> sse_history;
  int iterations = 0;
  bool converged = false;

  double sse() const { return sse_history.empty() ? 0.0 : sse_history.back(); }
};

// Lloyd iterations from k-means++ seeding over an n x dim row-major matrix.
// Empty clusters are reseeded with the point farthest from its centroid.
// Results are identical for any num_threads. Throws DataError when n < k,
// k < 1 or an entry is not finite.
KMeansResult KMeans(std::span<const float> data, size_t n, size_t dim,
                    const KMeansOptions& options);

struct Cluster {
  int id = 0;
  std::vector<InstanceId> members;  // sorted

  size_t size() const { return members.size(); }
  bool operator==(const Cluster&) const = default;
};

struct VocabularyFilter {
  std::vector<size_t> retained_rows;
  // Token types removed for exceeding the cap, with their frequency.
  std::vector<std::pair<std::string, int64_t>> removed_types;
  int64_t removed_rows = 0;
};

struct ClusterSet {
  int k = 0;
  size_t dim = 0;
  std::vector<Cluster> clusters;  // kept clusters, ascending id
  std::vector<Cluster> pruned;    // oversize clusters, ascending id
  std::vector<double> centroids;  // k x dim, indexed by cluster id
  DiscoveryConfig config;
  std::string source_manifest;
  std::vector<double> sse_history;
  int iterations = 0;
  bool converged = false;
  int64_t retained_rows = 0;
  std::vector<std::pair<std::string, int64_t>> removed_types;

  const Cluster* Find(int id) const;
  size_t total_members() const;
};

// Frequency of each token text over the given rows.
std::map<std::string, int64_t> TokenFrequencies(
    const std::vector<ActivationRow>& rows);
std::map<std::string, int64_t> TokenFrequencies(
    const std::vector<std::vector<TaggedToken>>& corpus_tokens);

// Drops every row whose token type occurs more than max_token_freq times.
VocabularyFilter FilterVocabulary(
    const ActivationDataset& dataset,
    const std::map<std::string, int64_t>& frequencies,
    int64_t max_token_freq);
VocabularyFilter FilterVocabulary(const ActivationDataset& dataset,
                                  int64_t max_token_freq);

// Moves clusters with more than max_cluster_size members to `pruned`.
ClusterSet PruneClusters(ClusterSet clusters, int64_t max_cluster_size);

// Filter, cluster and prune a dataset. Frequencies default to the dataset's
// own token table.
ClusterSet Discover(const ActivationDataset& dataset,
                    const DiscoveryConfig& config,
                    const std::string& source_manifest = "");
ClusterSet Discover(const ActivationDataset& dataset,
                    const std::map<std::string, int64_t>& frequencies,
                    const DiscoveryConfig& config,
                    const std::string& source_manifest = "");

// JSON with a config block, per-cluster (snippet_id, token_idx) members and
// centroids as a base64 little-endian float32 block.
void WriteClusterSet(const ClusterSet& clusters,
                     const std::filesystem::path& path);
ClusterSet ReadClusterSet(const std::filesystem::path& path);
std::string ClusterSetToJson(const ClusterSet& clusters);
ClusterSet ClusterSetFromJson(std::string_view json);

}  // namespace codeconcept

#endif  // CODECONCEPT_DISCOVERY_H_
