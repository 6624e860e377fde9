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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "codeconcept/errors.h"
#include "codeconcept/float_block.h"

namespace codeconcept {
namespace {

// Row blocks used for parallel work and for ordered reductions. The size is
// fixed so that floating-point summation order never depends on threads.
constexpr size_t kBlockRows = 1024;

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename Fn>
void ParallelBlocks(size_t n, int num_threads, Fn&& fn) {
  const size_t blocks = (n + kBlockRows - 1) / kBlockRows;
  const size_t threads =
      std::min<size_t>(std::max(1, num_threads), std::max<size_t>(1, blocks));
  auto run = [&](size_t t) {
    for (size_t b = t; b < blocks; b += threads) {
      fn(b, b * kBlockRows, std::min(n, (b + 1) * kBlockRows));
    }
  };
  if (threads == 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  for (size_t t = 0; t < threads; ++t) pool.emplace_back(run, t);
}

double SquaredDistance(const float* x, const double* c, size_t dim) {
  double acc = 0.0;
  for (size_t j = 0; j < dim; ++j) {
    const double diff = static_cast<double>(x[j]) - c[j];
    acc += diff * diff;
  }
  return acc;
}

class Lloyd {
 public:
  Lloyd(std::span<const float> data, size_t n, size_t dim,
        const KMeansOptions& options)
      : data_(data), n_(n), dim_(dim), k_(static_cast<size_t>(options.k)),
        options_(options), assignment_(n, 0), distance_(n, 0.0) {}

  KMeansResult Run() {
    KMeansResult result;
    centroids_ = SeedPlusPlus();
    for (int iter = 0; iter < options_.max_iter; ++iter) {
      result.sse_history.push_back(Assign());
      ReseedEmpty();
      std::vector<double> updated = Means();
      double shift = 0.0;
      for (size_t c = 0; c < k_; ++c) {
        double d2 = 0.0;
        for (size_t j = 0; j < dim_; ++j) {
          const double diff = updated[c * dim_ + j] - centroids_[c * dim_ + j];
          d2 += diff * diff;
        }
        shift = std::max(shift, std::sqrt(d2));
      }
      centroids_ = std::move(updated);
      result.iterations = iter + 1;
      if (shift < options_.tol) {
        result.converged = true;
        break;
      }
    }
    // Final assignment against the returned centroids, so each member's
    // nearest centroid is its own.
    result.sse_history.push_back(Assign());
    result.assignment = assignment_;
    result.centroids = centroids_;
    return result;
  }

 private:
  const float* RowPtr(size_t i) const { return data_.data() + i * dim_; }

  std::vector<double> SeedPlusPlus() {
    std::mt19937_64 rng(options_.seed);
    std::vector<double> centroids(k_ * dim_);
    std::vector<char> chosen(n_, 0);
    auto take = [&](size_t c, size_t row) {
      chosen[row] = 1;
      for (size_t j = 0; j < dim_; ++j) {
        centroids[c * dim_ + j] = RowPtr(row)[j];
      }
    };
    take(0, std::min(n_ - 1, static_cast<size_t>(UniformUnit(rng) * n_)));

    std::vector<double> d2(n_);
    for (size_t i = 0; i < n_; ++i) {
      d2[i] = SquaredDistance(RowPtr(i), centroids.data(), dim_);
    }
    for (size_t c = 1; c < k_; ++c) {
      std::vector<double> block_sums((n_ + kBlockRows - 1) / kBlockRows, 0.0);
      for (size_t b = 0; b < block_sums.size(); ++b) {
        for (size_t i = b * kBlockRows; i < std::min(n_, (b + 1) * kBlockRows);
             ++i) {
          block_sums[b] += d2[i];
        }
      }
      double total = 0.0;
      for (double s : block_sums) total += s;

      size_t pick = n_;
      if (total > 0.0) {
        double target = UniformUnit(rng) * total;
        for (size_t i = 0; i < n_; ++i) {
          if (chosen[i] || d2[i] <= 0.0) continue;
          pick = i;
          target -= d2[i];
          if (target < 0.0) break;
        }
      }
      if (pick == n_) {
        // All remaining mass is zero: duplicates only. Take the first row
        // not yet used as a centre.
        pick = static_cast<size_t>(
            std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
      }
      take(c, pick);
      const double* centre = centroids.data() + c * dim_;
      ParallelBlocks(n_, options_.num_threads,
                     [&](size_t, size_t begin, size_t end) {
                       for (size_t i = begin; i < end; ++i) {
                         d2[i] = std::min(d2[i],
                                          SquaredDistance(RowPtr(i), centre,
                                                          dim_));
                       }
                     });
    }
    return centroids;
  }

  // Nearest-centroid assignment; ties go to the lower cluster id. Returns the
  // SSE of the new assignment.
  double Assign() {
    std::vector<double> block_sse((n_ + kBlockRows - 1) / kBlockRows, 0.0);
    ParallelBlocks(n_, options_.num_threads,
                   [&](size_t block, size_t begin, size_t end) {
                     double sse = 0.0;
                     for (size_t i = begin; i < end; ++i) {
                       double best = std::numeric_limits<double>::infinity();
                       int best_c = 0;
                       for (size_t c = 0; c < k_; ++c) {
                         const double d = SquaredDistance(
                             RowPtr(i), centroids_.data() + c * dim_, dim_);
                         if (d < best) {
                           best = d;
                           best_c = static_cast<int>(c);
                         }
                       }
                       assignment_[i] = best_c;
                       distance_[i] = best;
                       sse += best;
                     }
                     block_sse[block] = sse;
                   });
    double total = 0.0;
    for (double s : block_sse) total += s;
    return total;
  }

  void ReseedEmpty() {
    std::vector<size_t> counts(k_, 0);
    for (int a : assignment_) ++counts[static_cast<size_t>(a)];
    for (size_t c = 0; c < k_; ++c) {
      if (counts[c] > 0) continue;
      size_t far = n_;
      double far_d = -1.0;
      for (size_t i = 0; i < n_; ++i) {
        if (counts[static_cast<size_t>(assignment_[i])] <= 1) continue;
        if (distance_[i] > far_d) {
          far_d = distance_[i];
          far = i;
        }
      }
      if (far == n_) break;
      --counts[static_cast<size_t>(assignment_[far])];
      assignment_[far] = static_cast<int>(c);
      distance_[far] = 0.0;
      counts[c] = 1;
    }
  }

  std::vector<double> Means() const {
    const size_t blocks = (n_ + kBlockRows - 1) / kBlockRows;
    std::vector<double> sums(k_ * dim_, 0.0);
    std::vector<size_t> counts(k_, 0);
    // Per-block partials merged in block order.
    std::vector<double> partial(k_ * dim_);
    std::vector<size_t> partial_counts(k_);
    for (size_t b = 0; b < blocks; ++b) {
      std::fill(partial.begin(), partial.end(), 0.0);
      std::fill(partial_counts.begin(), partial_counts.end(), 0);
      for (size_t i = b * kBlockRows; i < std::min(n_, (b + 1) * kBlockRows);
           ++i) {
        const size_t c = static_cast<size_t>(assignment_[i]);
        ++partial_counts[c];
        for (size_t j = 0; j < dim_; ++j) partial[c * dim_ + j] += RowPtr(i)[j];
      }
      for (size_t x = 0; x < sums.size(); ++x) sums[x] += partial[x];
      for (size_t c = 0; c < k_; ++c) counts[c] += partial_counts[c];
    }
    std::vector<double> means = centroids_;
    for (size_t c = 0; c < k_; ++c) {
      if (counts[c] == 0) continue;
      for (size_t j = 0; j < dim_; ++j) {
        means[c * dim_ + j] = sums[c * dim_ + j] / static_cast<double>(counts[c]);
      }
    }
    return means;
  }

  std::span<const float> data_;
  size_t n_;
  size_t dim_;
  size_t k_;
  KMeansOptions options_;
  std::vector<double> centroids_;
  std::vector<int> assignment_;
  std::vector<double> distance_;
};

using nlohmann::ordered_json;

ordered_json ClusterToJson(const Cluster& cluster) {
  ordered_json members = ordered_json::array();
  for (const auto& m : cluster.members) {
    members.push_back(ordered_json::array({m.snippet_id, m.token_idx}));
  }
  ordered_json j;
  j["id"] = cluster.id;
  j["size"] = cluster.members.size();
  j["members"] = std::move(members);
  return j;
}

Cluster ClusterFromJson(const nlohmann::json& j) {
  Cluster cluster;
  cluster.id = j.at("id").get<int>();
  for (const auto& m : j.at("members")) {
    cluster.members.push_back(
        {m.at(0).get<std::string>(), m.at(1).get<int32_t>()});
  }
  return cluster;
}

}  // namespace

KMeansResult KMeans(std::span<const float> data, size_t n, size_t dim,
                    const KMeansOptions& options) {
  if (options.k < 1) throw DataError("k must be at least 1");
  if (dim == 0) throw DataError("k-means needs dim > 0");
  if (n < static_cast<size_t>(options.k)) {
    throw DataError("k-means needs at least k rows: N=" + std::to_string(n) +
                    " < k=" + std::to_string(options.k));
  }
  if (data.size() != n * dim) throw DataError("matrix size does not match N x d");
  for (size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw DataError("non-finite k-means input at row " +
                      std::to_string(i / dim));
    }
  }
  return Lloyd(data, n, dim, options).Run();
}

const Cluster* ClusterSet::Find(int id) const {
  for (const auto* list : {&clusters, &pruned}) {
    for (const auto& c : *list) {
      if (c.id == id) return &c;
    }
  }
  return nullptr;
}

size_t ClusterSet::total_members() const {
  size_t total = 0;
  for (const auto& c : clusters) total += c.size();
  return total;
}

std::map<std::string, int64_t> TokenFrequencies(
    const std::vector<ActivationRow>& rows) {
  std::map<std::string, int64_t> freq;
  for (const auto& row : rows) ++freq[row.text];
  return freq;
}

std::map<std::string, int64_t> TokenFrequencies(
    const std::vector<std::vector<TaggedToken>>& corpus_tokens) {
  std::map<std::string, int64_t> freq;
  for (const auto& snippet : corpus_tokens) {
    for (const auto& t : snippet) ++freq[t.token.text];
  }
  return freq;
}

VocabularyFilter FilterVocabulary(
    const ActivationDataset& dataset,
    const std::map<std::string, int64_t>& frequencies,
    int64_t max_token_freq) {
  VocabularyFilter filter;
  std::map<std::string, int64_t> removed;
  for (size_t i = 0; i < dataset.rows.size(); ++i) {
    const auto& text = dataset.rows[i].text;
    auto it = frequencies.find(text);
    const int64_t freq = it == frequencies.end() ? 0 : it->second;
    if (freq > max_token_freq) {
      removed[text] = freq;
      ++filter.removed_rows;
    } else {
      filter.retained_rows.push_back(i);
    }
  }
  filter.removed_types.assign(removed.begin(), removed.end());
  return filter;
}

VocabularyFilter FilterVocabulary(const ActivationDataset& dataset,
                                  int64_t max_token_freq) {
  return FilterVocabulary(dataset, TokenFrequencies(dataset.rows),
                          max_token_freq);
}

ClusterSet PruneClusters(ClusterSet clusters, int64_t max_cluster_size) {
  std::vector<Cluster> kept;
  for (auto& cluster : clusters.clusters) {
    if (static_cast<int64_t>(cluster.size()) > max_cluster_size) {
      clusters.pruned.push_back(std::move(cluster));
    } else {
      kept.push_back(std::move(cluster));
    }
  }
  clusters.clusters = std::move(kept);
  std::sort(clusters.pruned.begin(), clusters.pruned.end(),
            [](const Cluster& a, const Cluster& b) { return a.id < b.id; });
  clusters.config.max_cluster_size = max_cluster_size;
  return clusters;
}

ClusterSet Discover(const ActivationDataset& dataset,
                    const std::map<std::string, int64_t>& frequencies,
                    const DiscoveryConfig& config,
                    const std::string& source_manifest) {
  VocabularyFilter filter =
      FilterVocabulary(dataset, frequencies, config.max_token_freq);
  const size_t dim = dataset.dim();
  std::vector<float> rows;
  rows.reserve(filter.retained_rows.size() * dim);
  for (size_t r : filter.retained_rows) {
    auto row = dataset.Row(r);
    rows.insert(rows.end(), row.begin(), row.end());
  }
  KMeansResult result =
      KMeans(rows, filter.retained_rows.size(), dim, config.kmeans);

  ClusterSet cs;
  cs.k = config.kmeans.k;
  cs.dim = dim;
  cs.config = config;
  cs.source_manifest = source_manifest;
  cs.centroids = std::move(result.centroids);
  cs.sse_history = std::move(result.sse_history);
  cs.iterations = result.iterations;
  cs.converged = result.converged;
  cs.retained_rows = static_cast<int64_t>(filter.retained_rows.size());
  cs.removed_types = std::move(filter.removed_types);
  cs.clusters.resize(static_cast<size_t>(cs.k));
  for (int c = 0; c < cs.k; ++c) cs.clusters[static_cast<size_t>(c)].id = c;
  for (size_t i = 0; i < filter.retained_rows.size(); ++i) {
    cs.clusters[static_cast<size_t>(result.assignment[i])].members.push_back(
        dataset.rows[filter.retained_rows[i]].id());
  }
  for (auto& cluster : cs.clusters) {
    std::sort(cluster.members.begin(), cluster.members.end());
  }
  return PruneClusters(std::move(cs), config.max_cluster_size);
}

ClusterSet Discover(const ActivationDataset& dataset,
                    const DiscoveryConfig& config,
                    const std::string& source_manifest) {
  return Discover(dataset, TokenFrequencies(dataset.rows), config,
                  source_manifest);
}

std::string ClusterSetToJson(const ClusterSet& cs) {
  ordered_json j;
  j["format_version"] = 1;
  ordered_json config;
  config["k"] = cs.config.kmeans.k;
  config["seed"] = cs.config.kmeans.seed;
  config["max_iter"] = cs.config.kmeans.max_iter;
  config["tol"] = cs.config.kmeans.tol;
  config["max_token_freq"] = cs.config.max_token_freq;
  config["max_cluster_size"] = cs.config.max_cluster_size;
  j["config"] = std::move(config);
  j["source_manifest"] = cs.source_manifest;
  j["k"] = cs.k;
  j["dim"] = cs.dim;
  j["iterations"] = cs.iterations;
  j["converged"] = cs.converged;
  j["sse_history"] = cs.sse_history;
  j["retained_rows"] = cs.retained_rows;
  ordered_json removed = ordered_json::array();
  for (const auto& [text, freq] : cs.removed_types) {
    removed.push_back(ordered_json::array({text, freq}));
  }
  j["removed_types"] = std::move(removed);
  ordered_json clusters = ordered_json::array();
  for (const auto& c : cs.clusters) clusters.push_back(ClusterToJson(c));
  j["clusters"] = std::move(clusters);
  ordered_json pruned = ordered_json::array();
  for (const auto& c : cs.pruned) pruned.push_back(ClusterToJson(c));
  j["pruned"] = std::move(pruned);
  j["centroids_f32_base64"] = Base64Encode(PackFloat32(cs.centroids));
  return j.dump(1) + "\n";
}

ClusterSet ClusterSetFromJson(std::string_view text) {
  ClusterSet cs;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format_version").get<int>() != 1) {
      throw FormatError("unsupported cluster-set format version");
    }
    const auto& config = j.at("config");
    cs.config.kmeans.k = config.at("k").get<int>();
    cs.config.kmeans.seed = config.at("seed").get<uint64_t>();
    cs.config.kmeans.max_iter = config.at("max_iter").get<int>();
    cs.config.kmeans.tol = config.at("tol").get<double>();
    cs.config.max_token_freq = config.at("max_token_freq").get<int64_t>();
    cs.config.max_cluster_size = config.at("max_cluster_size").get<int64_t>();
    cs.source_manifest = j.at("source_manifest").get<std::string>();
    cs.k = j.at("k").get<int>();
    cs.dim = j.at("dim").get<size_t>();
    cs.iterations = j.at("iterations").get<int>();
    cs.converged = j.at("converged").get<bool>();
    cs.sse_history = j.at("sse_history").get<std::vector<double>>();
    cs.retained_rows = j.at("retained_rows").get<int64_t>();
    for (const auto& r : j.at("removed_types")) {
      cs.removed_types.emplace_back(r.at(0).get<std::string>(),
                                    r.at(1).get<int64_t>());
    }
    for (const auto& c : j.at("clusters")) {
      cs.clusters.push_back(ClusterFromJson(c));
    }
    for (const auto& c : j.at("pruned")) cs.pruned.push_back(ClusterFromJson(c));
    const auto floats = UnpackFloat32(
        Base64Decode(j.at("centroids_f32_base64").get<std::string>()));
    cs.centroids.assign(floats.begin(), floats.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed cluster set: ") + e.what());
  }
  if (cs.centroids.size() != static_cast<size_t>(cs.k) * cs.dim) {
    throw FormatError("cluster set centroid block has " +
                      std::to_string(cs.centroids.size()) +
                      " values, expected k x dim = " +
                      std::to_string(static_cast<size_t>(cs.k) * cs.dim));
  }
  return cs;
}

void WriteClusterSet(const ClusterSet& clusters,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << ClusterSetToJson(clusters);
}

ClusterSet ReadClusterSet(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read cluster set " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ClusterSetFromJson(buffer.str());
}

}  // namespace codeconcept
