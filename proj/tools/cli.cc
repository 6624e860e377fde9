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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "codeconcept/activation_io.h"
#include "codeconcept/alignment.h"
#include "codeconcept/annotate.h"
#include "codeconcept/attribution.h"
#include "codeconcept/corpus.h"
#include "codeconcept/discovery.h"
#include "codeconcept/errors.h"
#include "codeconcept/perturb.h"
#include "codeconcept/robustness.h"
#include "codeconcept/stub_activations.h"
#include "codeconcept/syntax_tree.h"

namespace codeconcept {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Runs `fn`, prefixing data failures with the artifact being processed.
template <typename Fn>
auto WithArtifact(const std::string& artifact, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(artifact + ": " + e.what());
  }
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::vector<TaggedToken> LoadTokens(const std::string& path) {
  return WithArtifact(path, [&] {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read token file");
    return ReadTokensJsonl(in);
  });
}

std::vector<std::vector<TaggedToken>> GroupBySnippet(
    const std::vector<TaggedToken>& tokens) {
  std::vector<std::vector<TaggedToken>> grouped;
  for (const auto& t : tokens) {
    if (grouped.empty() ||
        grouped.back().front().token.snippet_id != t.token.snippet_id) {
      grouped.emplace_back();
    }
    grouped.back().push_back(t);
  }
  return grouped;
}

std::unordered_map<InstanceId, std::string, InstanceIdHash> TextsById(
    const std::vector<TaggedToken>& tokens) {
  std::unordered_map<InstanceId, std::string, InstanceIdHash> texts;
  for (const auto& t : tokens) {
    texts[{t.token.snippet_id, t.token.token_idx}] = t.token.text;
  }
  return texts;
}

// The trimmed source line holding byte `pos`.
std::string LineAt(const std::string& source, uint32_t pos) {
  size_t begin = source.rfind('\n', pos == 0 ? 0 : pos - 1);
  begin = begin == std::string::npos || pos == 0 ? 0 : begin + 1;
  if (pos == 0) begin = 0;
  size_t end = source.find('\n', pos);
  if (end == std::string::npos) end = source.size();
  std::string line = source.substr(begin, end - begin);
  const auto first = line.find_first_not_of(" \t\r");
  const auto last = line.find_last_not_of(" \t\r");
  return first == std::string::npos ? "" : line.substr(first, last - first + 1);
}

std::map<std::string, std::string> SourcesById(const std::string& corpus_dir) {
  std::map<std::string, std::string> sources;
  const Corpus corpus = WithArtifact(corpus_dir, [&] { return LoadCorpus(corpus_dir); });
  for (const auto& s : corpus.snippets) sources[s.id] = s.source;
  return sources;
}

// Distinct member texts of a cluster, most frequent first, ties by text.
std::vector<std::pair<std::string, size_t>> TopTexts(
    const Cluster& cluster,
    const std::unordered_map<InstanceId, std::string, InstanceIdHash>& texts) {
  std::map<std::string, size_t> counts;
  for (const auto& m : cluster.members) {
    auto it = texts.find(m);
    if (it == texts.end()) {
      throw DataError("cluster " + std::to_string(cluster.id) + " member " +
                      m.snippet_id + "#" + std::to_string(m.token_idx) +
                      " is missing from the token table");
    }
    ++counts[it->second];
  }
  std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return ranked;
}

std::string MarkdownCode(const std::string& text) {
  std::string escaped;
  for (char c : text) {
    if (c == '`') {
      escaped += "'";
    } else if (c == '|') {
      escaped += "\\|";
    } else if (c == '\n') {
      escaped += ' ';
    } else {
      escaped += c;
    }
  }
  return "`" + escaped + "`";
}

// ---------------------------------------------------------------------------

struct TokenizeArgs {
  std::string corpus;
  std::string language;
  std::string out;
  std::string vocab;
  int threads = 1;
};

int RunTokenize(const TokenizeArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<std::set<Language>> filter;
  if (!a.language.empty()) {
    const auto language = LanguageFromName(a.language);
    if (!language) throw ConfigError("unknown language: " + a.language);
    filter = std::set<Language>{*language};
  }
  const Corpus corpus =
      WithArtifact(a.corpus, [&] { return LoadCorpus(a.corpus, filter); });
  for (const auto& w : corpus.warnings) err << "warning: " << w << "\n";
  const auto tokens =
      WithArtifact(a.corpus, [&] { return TokenizeCorpus(corpus, a.threads); });
  std::ostringstream jsonl;
  WriteTokensJsonl(jsonl, tokens);
  WriteText(a.out, jsonl.str());
  size_t count = 0;
  for (const auto& s : tokens) count += s.size();
  if (!a.vocab.empty()) {
    const SyntacticLabeling labeling = SyntacticTags(corpus);
    Json j;
    j["tags"] = std::vector<std::string>(labeling.tag_vocabulary.begin(),
                                         labeling.tag_vocabulary.end());
    WriteText(a.vocab, j.dump(2) + "\n");
  }
  out << "tokenized " << corpus.snippets.size() << " snippets, " << count
      << " tokens -> " << a.out << "\n";
  return kExitOk;
}

struct StubArgs {
  std::string tokens;
  std::string out;
  StubOptions options;
  std::string transfer_from;
  std::string map;
};

int RunStub(const StubArgs& a, std::ostream& out, std::ostream&) {
  const auto grouped = GroupBySnippet(LoadTokens(a.tokens));
  ActivationDataset dataset;
  if (a.transfer_from.empty()) {
    dataset = StubActivations(grouped, a.options);
  } else {
    if (a.map.empty()) throw ConfigError("--transfer-from requires --map");
    const auto original = WithArtifact(a.transfer_from, [&] {
      return ReadActivations(a.transfer_from);
    });
    const auto maps = WithArtifact(a.map, [&] {
      std::ifstream in(a.map);
      return ReadCorrespondenceJsonl(in);
    });
    dataset = TransferActivations(original, grouped, maps, a.options);
  }
  WriteActivations(dataset, a.out);
  out << "wrote " << dataset.size() << " x " << dataset.dim()
      << " activations -> " << a.out << "\n";
  return kExitOk;
}

struct DiscoverArgs {
  std::string activations;
  std::string out;
  DiscoveryConfig config;
};

int RunDiscover(const DiscoverArgs& a, std::ostream& out, std::ostream&) {
  const auto dataset =
      WithArtifact(a.activations, [&] { return ReadActivations(a.activations); });
  const ClusterSet clusters = WithArtifact(a.activations, [&] {
    return Discover(dataset, a.config, a.activations);
  });
  WriteClusterSet(clusters, a.out);
  out << "k=" << clusters.k << ": " << clusters.clusters.size() << " kept, "
      << clusters.pruned.size() << " pruned, " << clusters.iterations
      << " iterations" << (clusters.converged ? " (converged)" : "") << " -> "
      << a.out << "\n";
  return kExitOk;
}

struct AlignArgs {
  std::string clusters;
  std::string tags;
  std::string vocab;
  std::vector<double> thresholds = {0.85, 0.9, 0.95};
  double lexical_threshold = 0.8;
  std::string out;
};

int RunAlign(const AlignArgs& a, std::ostream& out, std::ostream& err) {
  const ClusterSet clusters =
      WithArtifact(a.clusters, [&] { return ReadClusterSet(a.clusters); });
  const auto tokens = LoadTokens(a.tags);
  std::set<std::string> vocabulary;
  if (!a.vocab.empty()) {
    WithArtifact(a.vocab, [&] {
      const auto j = nlohmann::json::parse(ReadText(a.vocab));
      for (const auto& t : j.at("tags")) vocabulary.insert(t.get<std::string>());
      return 0;
    });
  } else {
    for (const auto& t : tokens) vocabulary.insert(t.tag);
    err << "warning: no --vocab given; tag coverage uses the "
        << vocabulary.size() << " observed tags\n";
  }
  const SyntacticLabeling labeling = LabelingFromTokens(tokens, vocabulary);
  const AlignmentReport report = WithArtifact(a.clusters, [&] {
    return BuildAlignmentReport(clusters.clusters, labeling, a.thresholds);
  });
  const LexicalReport lexical = WithArtifact(a.clusters, [&] {
    return BuildLexicalReport(clusters, TextsById(tokens), a.lexical_threshold);
  });
  const fs::path dir(a.out);
  WriteText(dir / "alignment.csv", AlignmentCsv(report));
  WriteText(dir / "alignment.md", AlignmentMarkdown(report));
  WriteText(dir / "lexical.csv", LexicalCsv(lexical));
  WriteText(dir / "lexical.md", LexicalMarkdown(lexical));
  Json j;
  j["vocabulary_size"] = report.vocabulary_size;
  j["total_clusters"] = report.total_clusters;
  Json per_cluster = Json::array();
  for (size_t i = 0; i < report.clusters.size(); ++i) {
    const auto& c = report.clusters[i];
    per_cluster.push_back({{"cluster_id", clusters.clusters[i].id},
                           {"tag", c.tag},
                           {"overlap", c.overlap},
                           {"size", c.size},
                           {"fraction", c.fraction}});
  }
  j["clusters"] = std::move(per_cluster);
  WriteText(dir / "alignment.json", j.dump(1) + "\n");
  for (const auto& m : report.per_threshold) {
    out << "theta=" << m.theta << ": " << m.clusters_labeled << "/"
        << report.total_clusters << " clusters aligned, tag coverage "
        << m.tag_coverage_pct << "%\n";
  }
  return kExitOk;
}

struct AnnotateArgs {
  std::string clusters;
  std::string tokens;
  std::string corpus;
  std::string out;
  std::string prompts_out;
  bool dry_run = false;
  std::string synonyms;
  std::string canonical_tags;
  std::string normalized_out;
  LlmConfig llm;
  PromptOptions prompt;
  bool no_top_k = false;
  int64_t timeout_ms = 60000;
};

int RunAnnotate(AnnotateArgs a, std::ostream& out, std::ostream& err) {
  const ClusterSet clusters =
      WithArtifact(a.clusters, [&] { return ReadClusterSet(a.clusters); });
  const auto tokens = LoadTokens(a.tokens);
  const auto sources = SourcesById(a.corpus);
  std::unordered_map<InstanceId, const TaggedToken*, InstanceIdHash> by_id;
  for (const auto& t : tokens) by_id[{t.token.snippet_id, t.token.token_idx}] = &t;
  const auto texts = TextsById(tokens);

  std::vector<AnnotationJob> jobs;
  for (const Cluster& cluster : clusters.clusters) {
    std::vector<std::string> words;
    for (const auto& [text, count] : TopTexts(cluster, texts)) words.push_back(text);
    std::vector<std::pair<std::string, std::string>> token_sentences;
    for (const auto& m : cluster.members) {
      const TaggedToken* t = by_id.at(m);
      auto src = sources.find(m.snippet_id);
      if (src == sources.end()) {
        throw DataError(a.corpus + ": snippet " + m.snippet_id +
                        " is missing from the corpus");
      }
      token_sentences.emplace_back(t->token.text,
                                   LineAt(src->second, t->token.start_byte));
    }
    const ContextSelection contexts =
        SelectContexts(token_sentences, a.prompt.max_contexts);
    jobs.push_back({cluster.id, BuildAnnotationPrompt(words, contexts.sentences,
                                                      a.prompt, contexts.available)});
  }
  if (!a.prompts_out.empty()) {
    std::ostringstream prompts;
    for (const auto& job : jobs) {
      prompts << Json{{"cluster_id", job.cluster_id}, {"prompt", job.prompt}}.dump()
              << "\n";
    }
    WriteText(a.prompts_out, prompts.str());
  }
  if (a.dry_run) {
    out << "built " << jobs.size() << " prompts (dry run, no requests sent)\n";
    return kExitOk;
  }
  a.llm.supports_top_k = !a.no_top_k;
  a.llm.timeout = std::chrono::milliseconds(a.timeout_ms);
  a.llm.Validate();
  const AnnotationBatch batch = AnnotateClusters(jobs, a.llm);
  std::ostringstream jsonl;
  WriteAnnotationsJsonl(jsonl, batch.annotations);
  WriteText(a.out, jsonl.str());
  for (const auto& [id, message] : batch.errors) {
    err << "cluster " << id << ": " << message << "\n";
  }
  if (!a.synonyms.empty() || !a.canonical_tags.empty()) {
    const auto synonyms = a.synonyms.empty()
                              ? std::map<std::string, std::string>{}
                              : ReadSynonymTsv(a.synonyms);
    const auto canonical = a.canonical_tags.empty()
                               ? std::set<std::string>{}
                               : ReadTagList(a.canonical_tags);
    const TagNormalization normalized =
        NormalizeTags(batch.annotations, synonyms, canonical);
    std::ostringstream norm;
    WriteAnnotationsJsonl(norm, normalized.annotations);
    const std::string path =
        a.normalized_out.empty() ? a.out + ".normalized" : a.normalized_out;
    WriteText(path, norm.str());
    for (const auto& [tag, count] : normalized.candidates) {
      out << "candidate tag: " << tag << " (" << count << ")\n";
    }
  }
  out << "annotated " << batch.annotations.size() << "/" << jobs.size()
      << " clusters -> " << a.out << "\n";
  return batch.errors.empty() ? kExitOk : kExitDataError;
}

struct PerturbArgs {
  std::string corpus;
  std::string kind;
  std::string out;
  std::string map;
  PerturbationOptions options;
  bool no_validate = false;
};

int RunPerturb(const PerturbArgs& a, std::ostream& out, std::ostream& err) {
  const auto kind = PerturbationFromName(a.kind);
  if (!kind) {
    std::string names;
    for (auto k : kAllPerturbationKinds) {
      names += (names.empty() ? "" : ", ") + std::string(PerturbationName(k));
    }
    throw ConfigError("unknown perturbation kind '" + a.kind +
                      "'; expected one of: " + names);
  }
  if (fs::exists(a.out) && fs::equivalent(a.out, a.corpus)) {
    throw ConfigError("--out must differ from --corpus");
  }
  const Corpus corpus = WithArtifact(a.corpus, [&] { return LoadCorpus(a.corpus); });
  for (const auto& w : corpus.warnings) err << "warning: " << w << "\n";
  std::vector<std::pair<PerturbationResult, PerturbationKind>> results;
  size_t applied = 0;
  size_t failures = 0;
  for (const Snippet& snippet : corpus.snippets) {
    PerturbationResult r = WithArtifact(snippet.id, [&] {
      if (!SupportsLanguage(*kind, snippet.language)) {
        PerturbationResult same;
        same.perturbed = snippet;
        same.applicable = false;
        same.map.original_snippet_id = snippet.id;
        same.map.perturbed_snippet_id = snippet.id;
        const auto count = static_cast<int32_t>(Tokenize(snippet).size());
        for (int32_t i = 0; i < count; ++i) same.map.pairs.emplace_back(i, i);
        return same;
      }
      return ApplyPerturbation(snippet, *kind, a.options);
    });
    if (r.applicable) {
      ++applied;
      if (!a.no_validate) {
        const auto report = ValidateSemanticsPreserved(snippet, r.perturbed, *kind);
        if (!report.ok) {
          ++failures;
          err << snippet.id << ": validation failed: " << report.Describe() << "\n";
        }
      }
    }
    WriteText(fs::path(a.out) / snippet.id, r.perturbed.source);
    results.emplace_back(std::move(r), *kind);
  }
  std::ostringstream maps;
  WriteCorrespondenceJsonl(maps, results);
  WriteText(a.map, maps.str());
  out << PerturbationName(*kind) << ": applied to " << applied << "/"
      << corpus.snippets.size() << " snippets -> " << a.out << "\n";
  if (failures > 0) {
    err << failures << " perturbed snippets failed validation\n";
    return kExitDataError;
  }
  return kExitOk;
}

struct CsiArgs {
  std::string before;
  std::string after;
  std::string map;
  std::string label = "perturbation";
  std::string out;
};

int RunCsi(const CsiArgs& a, std::ostream& out, std::ostream&) {
  const ClusterSet before =
      WithArtifact(a.before, [&] { return ReadClusterSet(a.before); });
  const ClusterSet after =
      WithArtifact(a.after, [&] { return ReadClusterSet(a.after); });
  std::vector<CorrespondenceMap> maps;
  if (!a.map.empty()) {
    maps = WithArtifact(a.map, [&] {
      std::ifstream in(a.map);
      if (!in) throw DataError("cannot read map file");
      return ReadCorrespondenceJsonl(in);
    });
  }
  const StabilityReport report = WithArtifact(a.after, [&] {
    return MatchClusterings(before, after, a.map.empty() ? nullptr : &maps);
  });
  WriteText(a.out, StabilityReportJson(report, a.label));
  out << a.label << ": Average Jaccard " << report.average_jaccard << ", CSI "
      << report.csi << " -> " << a.out << "\n";
  return kExitOk;
}

struct AttributeArgs {
  std::string activations;
  std::string clusters;
  std::string attributions;
  std::string tokens;
  std::string corpus;
  std::string out;
  double top_p = 0.5;
  std::string task = "Programming Language Classification";
  std::string classifier;
  std::string save_classifier;
  ClassifierConfig config;
  size_t max_words = 50;
};

int RunAttribute(const AttributeArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.top_p > 0.0 && a.top_p <= 1.0)) {
    throw ConfigError("--top-p must lie in (0, 1]");
  }
  const auto dataset =
      WithArtifact(a.activations, [&] { return ReadActivations(a.activations); });
  const ClusterSet clusters =
      WithArtifact(a.clusters, [&] { return ReadClusterSet(a.clusters); });
  if (clusters.dim != dataset.dim()) {
    throw DataError(a.clusters + ": clusters have dimension " +
                    std::to_string(clusters.dim) + " but " + a.activations +
                    " has " + std::to_string(dataset.dim()));
  }
  if (!clusters.source_manifest.empty() &&
      clusters.source_manifest != a.activations) {
    err << "warning: clusters were discovered on " << clusters.source_manifest
        << ", classifier features come from " << a.activations << "\n";
  }
  ConceptClassifier classifier;
  if (!a.classifier.empty()) {
    classifier = WithArtifact(a.classifier,
                              [&] { return ConceptClassifier::Load(a.classifier); });
  } else {
    auto [trained, stats] = WithArtifact(a.clusters, [&] {
      return TrainConceptClassifier(dataset, clusters, a.config);
    });
    classifier = std::move(trained);
    out << "classifier: " << stats.epochs << " epochs, loss " << stats.final_loss
        << ", training accuracy " << stats.accuracy << "\n";
  }
  if (!a.save_classifier.empty()) classifier.Save(a.save_classifier);

  const auto tokens = LoadTokens(a.tokens);
  const auto grouped = GroupBySnippet(tokens);
  std::map<std::string, size_t> counts;
  std::map<std::string, const std::vector<TaggedToken>*> snippet_tokens;
  for (const auto& s : grouped) {
    counts[s.front().token.snippet_id] = s.size();
    snippet_tokens[s.front().token.snippet_id] = &s;
  }
  const auto records = WithArtifact(a.attributions, [&] {
    return ReadAttributions(a.attributions, counts);
  });
  const auto sources = SourcesById(a.corpus);
  const auto index = dataset.IndexByInstance();
  const auto texts = TextsById(tokens);
  std::map<int, std::vector<std::string>> cluster_words;
  for (const auto& c : clusters.clusters) {
    auto& words = cluster_words[c.id];
    for (const auto& [text, n] : TopTexts(c, texts)) words.push_back(text);
  }

  std::ostringstream jsonl;
  for (const auto& record : records) {
    const SalientSelection selection = WithArtifact(
        a.attributions, [&] { return SelectSalient(record, a.top_p); });
    const auto& toks = *snippet_tokens.at(record.snippet_id);
    const std::string& source = sources.count(record.snippet_id)
                                    ? sources.at(record.snippet_id)
                                    : throw DataError(a.corpus + ": snippet " +
                                                      record.snippet_id +
                                                      " is missing");
    Json j;
    j["snippet_id"] = record.snippet_id;
    j["predicted_label"] = record.predicted_label;
    j["true_label"] = record.true_label;
    j["top_p"] = a.top_p;
    j["cumulative"] = selection.cumulative;
    Json selected = Json::array();
    for (int32_t idx : selection.selected) {
      const TaggedToken& tok = toks[static_cast<size_t>(idx)];
      auto row = index.find({record.snippet_id, idx});
      if (row == index.end()) {
        throw DataError(a.activations + ": no activation row for " +
                        record.snippet_id + "#" + std::to_string(idx));
      }
      auto [concept_id, probs] = classifier.Predict(dataset.Row(row->second));
      const auto& ids = classifier.cluster_ids();
      const size_t slot = std::find(ids.begin(), ids.end(), concept_id) - ids.begin();
      ExplanationInput input;
      input.task = a.task;
      input.language = record.predicted_label;
      input.token = tok.token.text;
      input.sentence = LineAt(source, tok.token.start_byte);
      // Position among the tokens that share the line.
      int position = 0;
      for (const auto& other : toks) {
        if (other.token.token_idx >= idx) break;
        if (LineAt(source, other.token.start_byte) == input.sentence &&
            source.rfind('\n', other.token.start_byte) ==
                source.rfind('\n', tok.token.start_byte)) {
          ++position;
        }
      }
      input.position = position;
      input.cluster_words = cluster_words.count(concept_id)
                                ? cluster_words.at(concept_id)
                                : std::vector<std::string>{};
      input.max_words = a.max_words;
      selected.push_back({{"token_idx", idx},
                          {"text", tok.token.text},
                          {"share", selection.normalized[static_cast<size_t>(idx)]},
                          {"concept", concept_id},
                          {"probability", probs[slot]},
                          {"prompt", BuildExplanationPrompt(input)}});
    }
    j["selected"] = std::move(selected);
    jsonl << j.dump() << "\n";
  }
  WriteText(a.out, jsonl.str());
  out << "explained " << records.size() << " snippets -> " << a.out << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::string clusters;
  std::string tokens;
  std::string alignment;
  std::vector<std::string> csi;
  std::string annotations;
  std::string out;
  size_t top = 30;
};

int RunReport(const ReportArgs& a, std::ostream& out, std::ostream&) {
  const ClusterSet clusters =
      WithArtifact(a.clusters, [&] { return ReadClusterSet(a.clusters); });
  const auto tokens = LoadTokens(a.tokens);
  const auto texts = TextsById(tokens);
  std::map<int, ConceptAnnotation> annotations;
  if (!a.annotations.empty()) {
    WithArtifact(a.annotations, [&] {
      std::ifstream in(a.annotations);
      for (auto& ann : ReadAnnotationsJsonl(in)) annotations[ann.cluster_id] = ann;
      return 0;
    });
  }

  std::ostringstream md;
  md << "# Latent concept report\n\n";
  md << "## Discovery\n\n";
  md << "| Setting | Value |\n|---|---|\n";
  md << "| Activations | " << MarkdownCode(clusters.source_manifest) << " |\n";
  md << "| K | " << clusters.k << " |\n";
  md << "| Kept clusters | " << clusters.clusters.size() << " |\n";
  md << "| Pruned clusters | " << clusters.pruned.size() << " |\n";
  md << "| Clustered tokens | " << clusters.retained_rows << " |\n";
  md << "| Removed token types | " << clusters.removed_types.size() << " |\n";
  md << "| Iterations | " << clusters.iterations
     << (clusters.converged ? " (converged)" : "") << " |\n";
  if (!clusters.sse_history.empty()) {
    md << "| Final SSE | " << clusters.sse_history.back() << " |\n";
  }
  md << "\n";

  if (!a.alignment.empty()) {
    const fs::path dir(a.alignment);
    md << "## Lexical patterns\n\n"
       << WithArtifact((dir / "lexical.md").string(),
                       [&] { return ReadText(dir / "lexical.md"); })
       << "\n";
    md << "## Syntactic alignment\n\n"
       << WithArtifact((dir / "alignment.md").string(),
                       [&] { return ReadText(dir / "alignment.md"); })
       << "\n";
  }

  if (!a.csi.empty()) {
    md << "## Robustness\n\n| Perturbation | Average Jaccard | CSI |\n|---|---|---|\n";
    double jaccard_sum = 0.0;
    double csi_sum = 0.0;
    for (const auto& path : a.csi) {
      WithArtifact(path, [&] {
        const auto j = nlohmann::json::parse(ReadText(path));
        const double jac = j.at("Average Jaccard").get<double>();
        const double csi = j.at("CSI").get<double>();
        jaccard_sum += jac;
        csi_sum += csi;
        std::ostringstream row;
        row.setf(std::ios::fixed);
        row.precision(3);
        row << "| " << j.value("perturbation", path) << " | " << jac << " | "
            << csi << " |\n";
        md << row.str();
        return 0;
      });
    }
    std::ostringstream avg;
    avg.setf(std::ios::fixed);
    avg.precision(3);
    const double n = static_cast<double>(a.csi.size());
    avg << "| **Average** | " << jaccard_sum / n << " | " << csi_sum / n << " |\n\n";
    md << avg.str();
  }

  md << "## Clusters\n\n";
  for (const Cluster& cluster : clusters.clusters) {
    md << "### Cluster " << cluster.id << " (" << cluster.size()
       << " tokens)\n\n";
    auto ann = annotations.find(cluster.id);
    if (ann != annotations.end()) {
      md << "**" << ann->second.label << "**";
      if (!ann->second.semantic_tags.empty()) {
        md << " — ";
        for (size_t i = 0; i < ann->second.semantic_tags.size(); ++i) {
          md << (i ? ", " : "") << ann->second.semantic_tags[i];
        }
      }
      md << "\n\n" << ann->second.description << "\n\n";
    }
    const auto ranked = TopTexts(cluster, texts);
    md << "Top tokens: ";
    for (size_t i = 0; i < ranked.size() && i < a.top; ++i) {
      md << (i ? ", " : "") << MarkdownCode(ranked[i].first) << " ("
         << ranked[i].second << ")";
    }
    md << "\n\n";
  }
  WriteText(a.out, md.str());
  out << "report -> " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Latent concept analysis for code models"};
  app.set_config("--config", "", "Read options from a key = value file");
  app.require_subcommand(1);
  std::function<int()> action;

  TokenizeArgs tokenize;
  auto* t = app.add_subcommand("tokenize", "Tokenize and tag a source corpus");
  t->add_option("--corpus", tokenize.corpus, "Corpus directory")
      ->required()->check(CLI::ExistingDirectory);
  t->add_option("--language", tokenize.language, "Only load this language");
  t->add_option("--out", tokenize.out, "Token JSONL output")->required();
  t->add_option("--vocab", tokenize.vocab, "Tag vocabulary JSON output");
  t->add_option("--threads", tokenize.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  t->callback([&] { action = [&] { return RunTokenize(tokenize, out, err); }; });

  StubArgs stub;
  auto* s = app.add_subcommand("stub-activations",
                               "Write deterministic hashed stand-in activations");
  s->add_option("--tokens", stub.tokens, "Token JSONL")
      ->required()->check(CLI::ExistingFile);
  s->add_option("--out", stub.out, "Output directory")->required();
  s->add_option("--dim", stub.options.dim, "Vector dimension")
      ->check(CLI::PositiveNumber);
  s->add_option("--seed", stub.options.seed, "Hash seed");
  s->add_option("--layer", stub.options.layer, "Layer recorded in the manifest");
  s->add_option("--model-id", stub.options.model_id, "Model id in the manifest");
  s->add_option("--transfer-from", stub.transfer_from,
                "Reuse rows of these activations through --map")
      ->check(CLI::ExistingPath);
  s->add_option("--map", stub.map, "Correspondence maps JSONL")
      ->check(CLI::ExistingFile);
  s->callback([&] { action = [&] { return RunStub(stub, out, err); }; });

  DiscoverArgs discover;
  auto* d = app.add_subcommand("discover", "Cluster activations into concepts");
  d->add_option("--activations", discover.activations, "Activation manifest or directory")
      ->required()->check(CLI::ExistingPath);
  d->add_option("--k", discover.config.kmeans.k, "Number of clusters")
      ->check(CLI::PositiveNumber);
  d->add_option("--seed", discover.config.kmeans.seed, "Seed");
  d->add_option("--max-iter", discover.config.kmeans.max_iter, "Lloyd iterations")
      ->check(CLI::PositiveNumber);
  d->add_option("--tol", discover.config.kmeans.tol, "Centroid shift tolerance")
      ->check(CLI::NonNegativeNumber);
  d->add_option("--threads", discover.config.kmeans.num_threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  d->add_option("--max-token-freq", discover.config.max_token_freq,
                "Drop token types occurring more often")
      ->check(CLI::PositiveNumber);
  d->add_option("--max-cluster-size", discover.config.max_cluster_size,
                "Prune larger clusters")
      ->check(CLI::PositiveNumber);
  d->add_option("--out", discover.out, "Cluster JSON output")->required();
  d->callback([&] { action = [&] { return RunDiscover(discover, out, err); }; });

  AlignArgs align;
  auto* al = app.add_subcommand("align", "Measure lexical and syntactic alignment");
  al->add_option("--clusters", align.clusters, "Cluster JSON")
      ->required()->check(CLI::ExistingFile);
  al->add_option("--tags", align.tags, "Token JSONL with syntactic tags")
      ->required()->check(CLI::ExistingFile);
  al->add_option("--vocab", align.vocab, "Tag vocabulary JSON")
      ->check(CLI::ExistingFile);
  al->add_option("--thresholds", align.thresholds, "Alignment thresholds")
      ->delimiter(',')->check(CLI::Range(0.0, 1.0));
  al->add_option("--lexical-threshold", align.lexical_threshold,
                 "Share of tokens a lexical pattern must cover")
      ->check(CLI::Range(0.0, 1.0));
  al->add_option("--out", align.out, "Output directory")->required();
  al->callback([&] { action = [&] { return RunAlign(align, out, err); }; });

  AnnotateArgs annotate;
  auto* an = app.add_subcommand("annotate", "Label clusters with an LLM");
  an->add_option("--clusters", annotate.clusters, "Cluster JSON")
      ->required()->check(CLI::ExistingFile);
  an->add_option("--tokens", annotate.tokens, "Token JSONL")
      ->required()->check(CLI::ExistingFile);
  an->add_option("--corpus", annotate.corpus, "Corpus directory for contexts")
      ->required()->check(CLI::ExistingDirectory);
  an->add_option("--out", annotate.out, "Annotation JSONL output")->required();
  an->add_option("--endpoint", annotate.llm.endpoint, "Chat completion URL");
  an->add_option("--auth-env", annotate.llm.auth_env,
                 "Environment variable holding the API key");
  an->add_option("--model", annotate.llm.model, "Model name");
  an->add_option("--temperature", annotate.llm.temperature, "Sampling temperature")
      ->check(CLI::Range(0.0, 2.0));
  an->add_option("--top-p", annotate.llm.top_p, "Nucleus sampling mass")
      ->check(CLI::Range(0.0, 1.0));
  an->add_option("--top-k", annotate.llm.top_k, "Top-k sampling")
      ->check(CLI::PositiveNumber);
  an->add_flag("--no-top-k", annotate.no_top_k, "Provider does not accept top_k");
  an->add_option("--max-retries", annotate.llm.max_retries, "Retries per request")
      ->check(CLI::NonNegativeNumber);
  an->add_option("--max-in-flight", annotate.llm.max_in_flight,
                 "Concurrent requests")
      ->check(CLI::PositiveNumber);
  an->add_option("--timeout-ms", annotate.timeout_ms, "Request timeout")
      ->check(CLI::PositiveNumber);
  an->add_option("--max-contexts", annotate.prompt.max_contexts,
                 "Context sentences per prompt");
  an->add_option("--max-tokens", annotate.prompt.max_tokens,
                 "Distinct tokens listed per prompt");
  an->add_option("--language", annotate.prompt.language, "Language named in prompts");
  an->add_option("--prompts-out", annotate.prompts_out, "Also write prompts JSONL");
  an->add_flag("--dry-run", annotate.dry_run, "Build prompts without requests");
  an->add_option("--synonyms", annotate.synonyms, "Tag synonym TSV")
      ->check(CLI::ExistingFile);
  an->add_option("--canonical-tags", annotate.canonical_tags,
                 "Canonical tag list, one per line")
      ->check(CLI::ExistingFile);
  an->add_option("--normalized-out", annotate.normalized_out,
                 "Normalized annotation JSONL output");
  an->callback([&] { action = [&] { return RunAnnotate(annotate, out, err); }; });

  PerturbArgs perturb;
  auto* p = app.add_subcommand("perturb", "Apply a semantic-preserving transform");
  p->add_option("--corpus", perturb.corpus, "Corpus directory")
      ->required()->check(CLI::ExistingDirectory);
  p->add_option("--kind", perturb.kind, "Transform name")->required();
  p->add_option("--seed", perturb.options.seed, "Seed");
  p->add_option("--noop-density", perturb.options.noop_density,
                "Share of statement boundaries receiving ';'")
      ->check(CLI::Range(0.0, 1.0));
  p->add_option("--out", perturb.out, "Output corpus directory")->required();
  p->add_option("--map", perturb.map, "Correspondence maps JSONL output")->required();
  p->add_flag("--no-validate", perturb.no_validate, "Skip semantic validation");
  p->callback([&] { action = [&] { return RunPerturb(perturb, out, err); }; });

  CsiArgs csi;
  auto* c = app.add_subcommand("csi", "Compare clusterings before and after a perturbation");
  c->add_option("--before", csi.before, "Cluster JSON of the original corpus")
      ->required()->check(CLI::ExistingFile);
  c->add_option("--after", csi.after, "Cluster JSON of the perturbed corpus")
      ->required()->check(CLI::ExistingFile);
  c->add_option("--map", csi.map, "Correspondence maps JSONL")
      ->check(CLI::ExistingFile);
  c->add_option("--label", csi.label, "Perturbation name in the report");
  c->add_option("--out", csi.out, "Report JSON output")->required();
  c->callback([&] { action = [&] { return RunCsi(csi, out, err); }; });

  AttributeArgs attribute;
  auto* at = app.add_subcommand("attribute", "Explain predictions through concepts");
  at->add_option("--activations", attribute.activations, "Activation manifest or directory")
      ->required()->check(CLI::ExistingPath);
  at->add_option("--clusters", attribute.clusters, "Cluster JSON")
      ->required()->check(CLI::ExistingFile);
  at->add_option("--attributions", attribute.attributions, "Attribution JSONL")
      ->required()->check(CLI::ExistingFile);
  at->add_option("--tokens", attribute.tokens, "Token JSONL")
      ->required()->check(CLI::ExistingFile);
  at->add_option("--corpus", attribute.corpus, "Corpus directory")
      ->required()->check(CLI::ExistingDirectory);
  at->add_option("--top-p", attribute.top_p, "Attribution mass to cover");
  at->add_option("--task", attribute.task, "Task named in prompts");
  at->add_option("--classifier", attribute.classifier, "Load a trained classifier")
      ->check(CLI::ExistingFile);
  at->add_option("--save-classifier", attribute.save_classifier,
                 "Write the classifier manifest here");
  at->add_option("--seed", attribute.config.seed, "Initialization seed");
  at->add_option("--learning-rate", attribute.config.learning_rate, "Step size")
      ->check(CLI::PositiveNumber);
  at->add_option("--l2", attribute.config.l2, "L2 penalty")
      ->check(CLI::NonNegativeNumber);
  at->add_option("--epochs", attribute.config.max_epochs, "Maximum epochs")
      ->check(CLI::PositiveNumber);
  at->add_option("--max-words", attribute.max_words, "Cluster words per prompt")
      ->check(CLI::PositiveNumber);
  at->add_option("--out", attribute.out, "Explanation JSONL output")->required();
  at->callback([&] { action = [&] { return RunAttribute(attribute, out, err); }; });

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Assemble a markdown report");
  r->add_option("--clusters", report.clusters, "Cluster JSON")
      ->required()->check(CLI::ExistingFile);
  r->add_option("--tokens", report.tokens, "Token JSONL")
      ->required()->check(CLI::ExistingFile);
  r->add_option("--alignment", report.alignment, "Output directory of align")
      ->check(CLI::ExistingDirectory);
  r->add_option("--csi", report.csi, "CSI report JSON (repeatable)")
      ->check(CLI::ExistingFile);
  r->add_option("--annotations", report.annotations, "Annotation JSONL")
      ->check(CLI::ExistingFile);
  r->add_option("--top", report.top, "Tokens listed per cluster")
      ->check(CLI::PositiveNumber);
  r->add_option("--out", report.out, "Markdown output")->required();
  r->callback([&] { action = [&] { return RunReport(report, out, err); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }
  try {
    return action();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
}

}  // namespace codeconcept
