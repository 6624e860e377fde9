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

#ifndef CODECONCEPT_ALIGNMENT_H_
#define CODECONCEPT_ALIGNMENT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codeconcept/corpus.h"
#include "codeconcept/discovery.h"

namespace codeconcept {

enum class LexicalPattern { kSubstring, kPrefix, kSuffix, kCamelCase, kPascalCase };

inline constexpr LexicalPattern kAllLexicalPatterns[] = {
    LexicalPattern::kSubstring, LexicalPattern::kPrefix,
    LexicalPattern::kSuffix, LexicalPattern::kCamelCase,
    LexicalPattern::kPascalCase};

std::string_view LexicalPatternName(LexicalPattern pattern);

inline constexpr size_t kMinSubstringLength = 4;

// A detected pattern, with the witness string for substring/prefix/suffix.
struct PatternMatch {
  LexicalPattern pattern;
  std::string witness;
  double fraction = 0.0;  // share of distinct texts exhibiting it

  bool operator==(const PatternMatch&) const = default;
};

bool IsCamelCase(std::string_view text);
bool IsPascalCase(std::string_view text);

// True when count / total reaches threshold, with a small tolerance for
// decimal thresholds such as 0.9.
bool MeetsThreshold(size_t count, size_t total, double threshold);

// Patterns exhibited by at least `threshold` of the cluster's distinct token
// texts. Prefix/suffix/substring need two or more distinct texts; their
// witness is the longest qualifying string (ties: higher count, then
// lexicographically smaller).
std::vector<PatternMatch> DetectLexicalPatterns(
    const std::vector<std::string>& texts, double threshold);

struct LexicalReport {
  double threshold = 0.8;
  size_t clusters = 0;
  std::map<LexicalPattern, size_t> counts;
  std::map<LexicalPattern, double> percentages;  // 0..100
};

// Over the kept (unpruned) clusters; texts looked up per member.
LexicalReport BuildLexicalReport(
    const ClusterSet& clusters,
    const std::unordered_map<InstanceId, std::string, InstanceIdHash>& texts,
    double threshold);

struct ClusterAlignment {
  std::string tag;          // majority tag, ties by lexicographic order
  size_t overlap = 0;       // members carrying `tag`
  size_t size = 0;
  double fraction = 0.0;    // overlap / size
  bool aligned = false;     // fraction >= theta
};

// Throws DataError for an unlabeled member or an empty cluster.
ClusterAlignment AlignCluster(const std::vector<InstanceId>& members,
                              const SyntacticLabeling& labeling, double theta);

// Whether some cluster has at least theta of its members tagged `tag`.
// Throws DataError for a tag outside the vocabulary.
bool Coverage(const std::string& tag, const std::vector<Cluster>& clusters,
              const SyntacticLabeling& labeling, double theta);

struct ThresholdMetrics {
  double theta = 0.0;
  size_t clusters_labeled = 0;
  double tag_coverage_pct = 0.0;
  double overall_alignment_score = 0.0;
  size_t unique_tags = 0;
  size_t unaligned_clusters = 0;
  std::vector<std::string> covered_tags;
};

struct AlignmentReport {
  size_t total_clusters = 0;
  size_t vocabulary_size = 0;
  std::vector<ThresholdMetrics> per_threshold;
  std::vector<ClusterAlignment> clusters;  // per kept cluster, theta unused
};

// Token-weighted purity: sum of majority-tag counts over all members.
AlignmentReport BuildAlignmentReport(const std::vector<Cluster>& clusters,
                                     const SyntacticLabeling& labeling,
                                     const std::vector<double>& thresholds);

std::string AlignmentCsv(const AlignmentReport& report);
std::string AlignmentMarkdown(const AlignmentReport& report);
std::string LexicalCsv(const LexicalReport& report);
std::string LexicalMarkdown(const LexicalReport& report);

}  // namespace codeconcept

#endif  // CODECONCEPT_ALIGNMENT_H_
