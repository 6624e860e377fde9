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

#include <algorithm>
#include <iomanip>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

using Counts = std::unordered_map<std::string, size_t>;

// Longest candidate meeting the threshold; ties by count then text.
std::optional<std::pair<std::string, size_t>> BestWitness(
    const Counts& counts, size_t total, double threshold) {
  std::optional<std::pair<std::string, size_t>> best;
  for (const auto& [text, count] : counts) {
    if (!MeetsThreshold(count, total, threshold)) continue;
    if (!best || text.size() > best->first.size() ||
        (text.size() == best->first.size() &&
         (count > best->second ||
          (count == best->second && text < best->first)))) {
      best = {text, count};
    }
  }
  return best;
}

std::map<std::string, size_t> TagCounts(const std::vector<InstanceId>& members,
                                        const SyntacticLabeling& labeling) {
  std::map<std::string, size_t> counts;
  for (const auto& m : members) ++counts[labeling.TagOf(m)];
  return counts;
}

std::string FormatDouble(double v, int precision) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << v;
  return out.str();
}

}  // namespace

std::string_view LexicalPatternName(LexicalPattern pattern) {
  switch (pattern) {
    case LexicalPattern::kSubstring:
      return "substring";
    case LexicalPattern::kPrefix:
      return "prefix";
    case LexicalPattern::kSuffix:
      return "suffix";
    case LexicalPattern::kCamelCase:
      return "camel";
    case LexicalPattern::kPascalCase:
      return "pascal";
  }
  return "unknown";
}

bool IsCamelCase(std::string_view text) {
  static const std::regex kCamel("^[a-z]+([A-Z][a-z0-9]*)+$");
  return std::regex_match(text.begin(), text.end(), kCamel);
}

bool IsPascalCase(std::string_view text) {
  static const std::regex kPascal("^[A-Z][a-z0-9]+([A-Z][a-z0-9]*)+$");
  return std::regex_match(text.begin(), text.end(), kPascal);
}

bool MeetsThreshold(size_t count, size_t total, double threshold) {
  if (total == 0) return false;
  return static_cast<double>(count) >=
         threshold * static_cast<double>(total) - 1e-9;
}

std::vector<PatternMatch> DetectLexicalPatterns(
    const std::vector<std::string>& texts, double threshold) {
  const std::set<std::string> distinct(texts.begin(), texts.end());
  const size_t n = distinct.size();
  std::vector<PatternMatch> found;
  if (n == 0) return found;

  if (n >= 2) {
    Counts substrings;
    Counts prefixes;
    Counts suffixes;
    for (const auto& text : distinct) {
      std::set<std::string_view> seen;
      const std::string_view view(text);
      for (size_t start = 0; start < view.size(); ++start) {
        for (size_t len = kMinSubstringLength; start + len <= view.size();
             ++len) {
          seen.insert(view.substr(start, len));
        }
      }
      for (auto s : seen) ++substrings[std::string(s)];
      for (size_t len = 1; len <= view.size(); ++len) {
        ++prefixes[std::string(view.substr(0, len))];
        ++suffixes[std::string(view.substr(view.size() - len))];
      }
    }
    const std::pair<LexicalPattern, const Counts*> families[] = {
        {LexicalPattern::kSubstring, &substrings},
        {LexicalPattern::kPrefix, &prefixes},
        {LexicalPattern::kSuffix, &suffixes}};
    for (const auto& [pattern, counts] : families) {
      if (auto best = BestWitness(*counts, n, threshold)) {
        found.push_back({pattern, best->first,
                         static_cast<double>(best->second) /
                             static_cast<double>(n)});
      }
    }
  }

  size_t camel = 0;
  size_t pascal = 0;
  for (const auto& text : distinct) {
    camel += IsCamelCase(text);
    pascal += IsPascalCase(text);
  }
  if (MeetsThreshold(camel, n, threshold)) {
    found.push_back({LexicalPattern::kCamelCase, "",
                     static_cast<double>(camel) / static_cast<double>(n)});
  }
  if (MeetsThreshold(pascal, n, threshold)) {
    found.push_back({LexicalPattern::kPascalCase, "",
                     static_cast<double>(pascal) / static_cast<double>(n)});
  }
  return found;
}

LexicalReport BuildLexicalReport(
    const ClusterSet& clusters,
    const std::unordered_map<InstanceId, std::string, InstanceIdHash>& texts,
    double threshold) {
  LexicalReport report;
  report.threshold = threshold;
  report.clusters = clusters.clusters.size();
  for (auto pattern : kAllLexicalPatterns) report.counts[pattern] = 0;
  for (const auto& cluster : clusters.clusters) {
    if (cluster.members.empty()) continue;
    std::vector<std::string> words;
    words.reserve(cluster.size());
    for (const auto& m : cluster.members) {
      auto it = texts.find(m);
      if (it == texts.end()) {
        throw DataError("no token text for " + m.snippet_id + "#" +
                        std::to_string(m.token_idx));
      }
      words.push_back(it->second);
    }
    for (const auto& match : DetectLexicalPatterns(words, threshold)) {
      ++report.counts[match.pattern];
    }
  }
  for (const auto& [pattern, count] : report.counts) {
    report.percentages[pattern] =
        report.clusters == 0 ? 0.0
                             : 100.0 * static_cast<double>(count) /
                                   static_cast<double>(report.clusters);
  }
  return report;
}

ClusterAlignment AlignCluster(const std::vector<InstanceId>& members,
                              const SyntacticLabeling& labeling,
                              double theta) {
  if (members.empty()) throw DataError("cannot align an empty cluster");
  ClusterAlignment result;
  result.size = members.size();
  // std::map iterates tags in lexicographic order, so strict '>' keeps the
  // smallest tag among equals.
  for (const auto& [tag, count] : TagCounts(members, labeling)) {
    if (count > result.overlap) {
      result.overlap = count;
      result.tag = tag;
    }
  }
  result.fraction =
      static_cast<double>(result.overlap) / static_cast<double>(result.size);
  result.aligned = MeetsThreshold(result.overlap, result.size, theta);
  return result;
}

bool Coverage(const std::string& tag, const std::vector<Cluster>& clusters,
              const SyntacticLabeling& labeling, double theta) {
  if (!labeling.tag_vocabulary.contains(tag)) {
    throw DataError("unknown tag: " + tag);
  }
  for (const auto& cluster : clusters) {
    if (cluster.members.empty()) continue;
    size_t count = 0;
    for (const auto& m : cluster.members) count += labeling.TagOf(m) == tag;
    if (count > 0 && MeetsThreshold(count, cluster.size(), theta)) return true;
  }
  return false;
}

AlignmentReport BuildAlignmentReport(const std::vector<Cluster>& clusters,
                                     const SyntacticLabeling& labeling,
                                     const std::vector<double>& thresholds) {
  AlignmentReport report;
  report.total_clusters = clusters.size();
  report.vocabulary_size = labeling.tag_vocabulary.size();

  std::vector<std::map<std::string, size_t>> counts;
  size_t total_members = 0;
  size_t total_best = 0;
  for (const auto& cluster : clusters) {
    counts.push_back(TagCounts(cluster.members, labeling));
    if (cluster.members.empty()) {
      report.clusters.push_back({});
      continue;
    }
    ClusterAlignment a = AlignCluster(cluster.members, labeling, 1.0);
    total_members += a.size;
    total_best += a.overlap;
    report.clusters.push_back(std::move(a));
  }
  const double score = total_members == 0
                           ? 0.0
                           : static_cast<double>(total_best) /
                                 static_cast<double>(total_members);

  for (double theta : thresholds) {
    ThresholdMetrics m;
    m.theta = theta;
    std::set<std::string> covered;
    for (size_t c = 0; c < clusters.size(); ++c) {
      const size_t size = clusters[c].members.size();
      if (size == 0) continue;
      if (MeetsThreshold(report.clusters[c].overlap, size, theta)) {
        ++m.clusters_labeled;
      }
      for (const auto& [tag, count] : counts[c]) {
        if (MeetsThreshold(count, size, theta)) covered.insert(tag);
      }
    }
    m.unaligned_clusters = report.total_clusters - m.clusters_labeled;
    m.unique_tags = covered.size();
    m.covered_tags.assign(covered.begin(), covered.end());
    m.tag_coverage_pct = report.vocabulary_size == 0
                             ? 0.0
                             : 100.0 * static_cast<double>(m.unique_tags) /
                                   static_cast<double>(report.vocabulary_size);
    m.overall_alignment_score = score;
    report.per_threshold.push_back(std::move(m));
  }
  return report;
}

std::string AlignmentCsv(const AlignmentReport& report) {
  std::ostringstream out;
  out << "theta,clusters_labeled,total_clusters,tag_coverage_pct,"
         "overall_alignment_score,unique_tags,vocabulary_size,"
         "unaligned_clusters\n";
  for (const auto& m : report.per_threshold) {
    out << FormatDouble(m.theta, 2) << ',' << m.clusters_labeled << ','
        << report.total_clusters << ',' << FormatDouble(m.tag_coverage_pct, 2)
        << ',' << FormatDouble(m.overall_alignment_score, 4) << ','
        << m.unique_tags << ',' << report.vocabulary_size << ','
        << m.unaligned_clusters << '\n';
  }
  return out.str();
}

std::string AlignmentMarkdown(const AlignmentReport& report) {
  std::ostringstream out;
  out << "| Metric |";
  for (const auto& m : report.per_threshold) {
    out << ' ' << FormatDouble(m.theta * 100.0, 0) << "% |";
  }
  out << "\n|---|";
  for (size_t i = 0; i < report.per_threshold.size(); ++i) out << "---|";
  out << '\n';
  auto row = [&](std::string_view name, auto&& cell) {
    out << "| " << name << " |";
    for (const auto& m : report.per_threshold) out << ' ' << cell(m) << " |";
    out << '\n';
  };
  row("Clusters Labeled (/" + std::to_string(report.total_clusters) + ")",
      [](const ThresholdMetrics& m) { return std::to_string(m.clusters_labeled); });
  row("Tag Coverage (%)", [](const ThresholdMetrics& m) {
    return FormatDouble(m.tag_coverage_pct, 1);
  });
  row("Overall Alignment Score", [](const ThresholdMetrics& m) {
    return FormatDouble(m.overall_alignment_score, 3);
  });
  row("Unique Tags Identified",
      [](const ThresholdMetrics& m) { return std::to_string(m.unique_tags); });
  row("Unaligned Clusters", [](const ThresholdMetrics& m) {
    return std::to_string(m.unaligned_clusters);
  });
  return out.str();
}

std::string LexicalCsv(const LexicalReport& report) {
  std::ostringstream out;
  out << "pattern,clusters,percentage,threshold\n";
  for (auto pattern : kAllLexicalPatterns) {
    out << LexicalPatternName(pattern) << ',' << report.counts.at(pattern)
        << ',' << FormatDouble(report.percentages.at(pattern), 2) << ','
        << FormatDouble(report.threshold, 2) << '\n';
  }
  return out.str();
}

std::string LexicalMarkdown(const LexicalReport& report) {
  static const std::map<LexicalPattern, std::string_view> kLabels = {
      {LexicalPattern::kSubstring, "Substring match (>3)"},
      {LexicalPattern::kPrefix, "Prefix"},
      {LexicalPattern::kSuffix, "Suffix"},
      {LexicalPattern::kCamelCase, "Camel Casing"},
      {LexicalPattern::kPascalCase, "Pascal Casing"}};
  std::ostringstream out;
  out << "| Pattern | Clusters (%) |\n|---|---|\n";
  for (auto pattern : kAllLexicalPatterns) {
    out << "| " << kLabels.at(pattern) << " | "
        << FormatDouble(report.percentages.at(pattern), 1) << " |\n";
  }
  out << "\nEvaluated at " << FormatDouble(report.threshold * 100.0, 0)
      << "% similarity threshold over " << report.clusters << " clusters.\n";
  return out.str();
}

}  // namespace codeconcept
