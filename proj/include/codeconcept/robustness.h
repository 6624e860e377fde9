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

#ifndef CODECONCEPT_ROBUSTNESS_H_
#define CODECONCEPT_ROBUSTNESS_H_

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "codeconcept/corpus.h"
#include "codeconcept/discovery.h"
#include "codeconcept/perturb.h"

namespace codeconcept {

using InstanceSet = std::unordered_set<InstanceId, InstanceIdHash>;

// |a ∩ b| / |a ∪ b|; 1 when both are empty.
double Jaccard(const InstanceSet& a, const InstanceSet& b);

// Maximum-weight perfect matching on a square matrix (row-major, n x n).
// Returns the column assigned to each row. Exact, O(n^3).
std::vector<int> MaxWeightAssignment(const std::vector<double>& weights,
                                     size_t n);

struct MatchedPair {
  std::optional<int> before_id;  // nullopt for a padding cluster
  std::optional<int> after_id;
  double jaccard = 0.0;
};

struct StabilityReport {
  std::vector<MatchedPair> matching;
  size_t k = 0;  // after padding
  double average_jaccard = 0.0;
  double csi = 0.0;
};

// Compares kept clusters of two clusterings. With `correspondence`, members
// of `after` are translated into the instance ids of `before`; unmatched
// perturbed instances stay distinct. Without it, both clusterings (kept and
// pruned) must cover the same instances; DataError names the first snippet
// where they differ.
StabilityReport MatchClusterings(
    const ClusterSet& before, const ClusterSet& after,
    const std::vector<CorrespondenceMap>* correspondence = nullptr);

// Same, over raw member lists.
StabilityReport MatchClusterings(const std::vector<InstanceSet>& before,
                                 const std::vector<InstanceSet>& after);

std::string StabilityReportJson(const StabilityReport& report,
                                const std::string& label);

}  // namespace codeconcept

#endif  // CODECONCEPT_ROBUSTNESS_H_
