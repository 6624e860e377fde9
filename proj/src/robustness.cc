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

#include <algorithm>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

// Prefix that keeps perturbed-only instances out of the original universe.
constexpr char kPerturbedOnlyPrefix[] = "\x01perturbed:";

InstanceSet ToSet(const Cluster& cluster) {
  return InstanceSet(cluster.members.begin(), cluster.members.end());
}

}  // namespace

double Jaccard(const InstanceSet& a, const InstanceSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  const InstanceSet& small = a.size() <= b.size() ? a : b;
  const InstanceSet& large = a.size() <= b.size() ? b : a;
  size_t shared = 0;
  for (const auto& x : small) shared += large.contains(x);
  const size_t united = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(united);
}

std::vector<int> MaxWeightAssignment(const std::vector<double>& weights,
                                     size_t n) {
  if (n == 0) return {};
  // Shortest augmenting path Hungarian method on costs = -weights, with row
  // and column potentials. Index 0 is a sentinel column.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<size_t> match_col(n + 1, 0), way(n + 1, 0);
  auto cost = [&](size_t i, size_t j) { return -weights[(i - 1) * n + (j - 1)]; };
  for (size_t i = 1; i <= n; ++i) {
    match_col[0] = i;
    size_t j0 = 0;
    std::vector<double> min_v(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const size_t i0 = match_col[j0];
      double delta = inf;
      size_t j1 = 0;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0, j) - u[i0] - v[j];
        if (reduced < min_v[j]) {
          min_v[j] = reduced;
          way[j] = j0;
        }
        if (min_v[j] < delta) {
          delta = min_v[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          min_v[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const size_t j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (size_t j = 1; j <= n; ++j) {
    row_to_col[match_col[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

StabilityReport MatchClusterings(const std::vector<InstanceSet>& before,
                                 const std::vector<InstanceSet>& after) {
  const size_t k = std::max(before.size(), after.size());
  StabilityReport report;
  report.k = k;
  if (k == 0) {
    report.average_jaccard = 1.0;
    report.csi = 0.0;
    return report;
  }
  static const InstanceSet kEmpty;
  auto at = [&](const std::vector<InstanceSet>& list, size_t i)
      -> const InstanceSet& { return i < list.size() ? list[i] : kEmpty; };

  std::vector<double> weights(k * k, 0.0);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      const bool padded = i >= before.size() || j >= after.size();
      weights[i * k + j] =
          padded ? 0.0 : Jaccard(at(before, i), at(after, j));
    }
  }
  const std::vector<int> assignment = MaxWeightAssignment(weights, k);
  double total = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const size_t j = static_cast<size_t>(assignment[i]);
    MatchedPair pair;
    if (i < before.size()) pair.before_id = static_cast<int>(i);
    if (j < after.size()) pair.after_id = static_cast<int>(j);
    pair.jaccard = weights[i * k + j];
    total += pair.jaccard;
    report.matching.push_back(pair);
  }
  report.average_jaccard = total / static_cast<double>(k);
  report.csi = 1.0 - report.average_jaccard;
  return report;
}

StabilityReport MatchClusterings(
    const ClusterSet& before, const ClusterSet& after,
    const std::vector<CorrespondenceMap>* correspondence) {
  std::vector<InstanceSet> lhs;
  for (const auto& c : before.clusters) lhs.push_back(ToSet(c));

  std::vector<InstanceSet> rhs;
  if (correspondence != nullptr) {
    std::map<std::string, const CorrespondenceMap*> by_snippet;
    for (const auto& map : *correspondence) {
      by_snippet[map.perturbed_snippet_id] = &map;
    }
    std::unordered_map<std::string, std::unordered_map<int32_t, int32_t>>
        translate;
    for (const auto& [id, map] : by_snippet) {
      auto& t = translate[id];
      for (const auto& [o, p] : map->pairs) t[p] = o;
    }
    for (const auto& cluster : after.clusters) {
      InstanceSet set;
      for (const auto& m : cluster.members) {
        auto snippet = by_snippet.find(m.snippet_id);
        if (snippet == by_snippet.end()) {
          throw DataError("no correspondence map for perturbed snippet " +
                          m.snippet_id);
        }
        const auto& t = translate[m.snippet_id];
        auto hit = t.find(m.token_idx);
        if (hit != t.end()) {
          set.insert({snippet->second->original_snippet_id, hit->second});
        } else {
          set.insert({kPerturbedOnlyPrefix + m.snippet_id, m.token_idx});
        }
      }
      rhs.push_back(std::move(set));
    }
  } else {
    // Without a map both clusterings must cover the same instances.
    auto universe = [](const ClusterSet& cs) {
      std::set<InstanceId> all;
      for (const auto* list : {&cs.clusters, &cs.pruned}) {
        for (const auto& c : *list) all.insert(c.members.begin(), c.members.end());
      }
      return all;
    };
    const std::set<InstanceId> lhs_all = universe(before);
    const std::set<InstanceId> rhs_all = universe(after);
    if (lhs_all != rhs_all) {
      std::vector<InstanceId> diff;
      std::set_symmetric_difference(lhs_all.begin(), lhs_all.end(),
                                    rhs_all.begin(), rhs_all.end(),
                                    std::back_inserter(diff));
      throw DataError("instance universes differ at snippet " +
                      diff.front().snippet_id + " (token " +
                      std::to_string(diff.front().token_idx) +
                      ") and no correspondence map was given");
    }
    for (const auto& c : after.clusters) rhs.push_back(ToSet(c));
  }

  StabilityReport report = MatchClusterings(lhs, rhs);
  for (auto& pair : report.matching) {
    if (pair.before_id) {
      pair.before_id = before.clusters[static_cast<size_t>(*pair.before_id)].id;
    }
    if (pair.after_id) {
      pair.after_id = after.clusters[static_cast<size_t>(*pair.after_id)].id;
    }
  }
  return report;
}

std::string StabilityReportJson(const StabilityReport& report,
                                const std::string& label) {
  nlohmann::ordered_json j;
  j["perturbation"] = label;
  j["Average Jaccard"] = report.average_jaccard;
  j["CSI"] = report.csi;
  j["k"] = report.k;
  nlohmann::ordered_json matching = nlohmann::ordered_json::array();
  for (const auto& pair : report.matching) {
    nlohmann::ordered_json m;
    m["before"] = pair.before_id ? nlohmann::ordered_json(*pair.before_id)
                                 : nlohmann::ordered_json(nullptr);
    m["after"] = pair.after_id ? nlohmann::ordered_json(*pair.after_id)
                               : nlohmann::ordered_json(nullptr);
    m["jaccard"] = pair.jaccard;
    matching.push_back(std::move(m));
  }
  j["matching"] = std::move(matching);
  return j.dump(2) + "\n";
}

}  // namespace codeconcept
