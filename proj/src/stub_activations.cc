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

#include "codeconcept/stub_activations.h"

#include <map>
#include <random>

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

uint64_t Fnv1a(std::string_view text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Adds weight * e(key) to `out`, where e(key) has components in [-1, 1).
void AddEmbedding(std::string_view key, double weight, uint64_t seed,
                  std::vector<double>& out) {
  std::mt19937_64 rng(Fnv1a(key) ^ (seed * 0x9E3779B97F4A7C15ull));
  for (double& v : out) v += weight * (((rng() >> 11) * 0x1p-53) * 2.0 - 1.0);
}

void StubRow(const std::vector<TaggedToken>& snippet, size_t i,
             const StubOptions& options, std::vector<float>& matrix) {
  std::vector<double> v(static_cast<size_t>(options.dim), 0.0);
  AddEmbedding("text:" + snippet[i].token.text, 1.0, options.seed, v);
  AddEmbedding("tag:" + snippet[i].tag, 0.75, options.seed, v);
  const std::string prev = i > 0 ? snippet[i - 1].token.text : "<s>";
  const std::string next = i + 1 < snippet.size() ? snippet[i + 1].token.text : "</s>";
  AddEmbedding("text:" + prev, 0.25, options.seed, v);
  AddEmbedding("text:" + next, 0.25, options.seed, v);
  for (double x : v) matrix.push_back(static_cast<float>(x));
}

ActivationDataset EmptyDataset(const StubOptions& options) {
  if (options.dim <= 0) {
    throw ConfigError("stub dimension must be positive, got " +
                      std::to_string(options.dim));
  }
  ActivationDataset dataset;
  dataset.manifest.model_id = options.model_id;
  dataset.manifest.layer = options.layer;
  dataset.manifest.dim = options.dim;
  return dataset;
}

void AddRow(ActivationDataset& dataset, const TaggedToken& t) {
  dataset.rows.push_back({t.token.snippet_id, t.token.token_idx, t.token.text});
}

}  // namespace

ActivationDataset StubActivations(
    const std::vector<std::vector<TaggedToken>>& tokens,
    const StubOptions& options) {
  ActivationDataset dataset = EmptyDataset(options);
  for (const auto& snippet : tokens) {
    for (size_t i = 0; i < snippet.size(); ++i) {
      AddRow(dataset, snippet[i]);
      StubRow(snippet, i, options, dataset.matrix);
    }
  }
  dataset.manifest.count = static_cast<int64_t>(dataset.rows.size());
  return dataset;
}

ActivationDataset TransferActivations(
    const ActivationDataset& original,
    const std::vector<std::vector<TaggedToken>>& perturbed_tokens,
    const std::vector<CorrespondenceMap>& maps, const StubOptions& options) {
  StubOptions stub = options;
  stub.dim = original.manifest.dim;
  ActivationDataset dataset = EmptyDataset(stub);
  dataset.manifest.model_id = original.manifest.model_id;
  dataset.manifest.layer = original.manifest.layer;
  dataset.manifest.num_layers = original.manifest.num_layers;
  std::map<std::string, const CorrespondenceMap*> by_perturbed;
  for (const auto& m : maps) by_perturbed[m.perturbed_snippet_id] = &m;
  const auto index = original.IndexByInstance();
  for (const auto& snippet : perturbed_tokens) {
    if (snippet.empty()) continue;
    const std::string& id = snippet.front().token.snippet_id;
    auto it = by_perturbed.find(id);
    if (it == by_perturbed.end()) {
      throw DataError("no correspondence map for perturbed snippet " + id);
    }
    std::map<int32_t, int32_t> source;  // perturbed idx -> original idx
    for (const auto& [o, p] : it->second->pairs) source[p] = o;
    for (size_t i = 0; i < snippet.size(); ++i) {
      AddRow(dataset, snippet[i]);
      auto s = source.find(snippet[i].token.token_idx);
      if (s == source.end()) {
        StubRow(snippet, i, stub, dataset.matrix);
        continue;
      }
      auto row = index.find({it->second->original_snippet_id, s->second});
      if (row == index.end()) {
        throw DataError("original token " + it->second->original_snippet_id +
                        "#" + std::to_string(s->second) +
                        " has no activation row");
      }
      auto values = original.Row(row->second);
      dataset.matrix.insert(dataset.matrix.end(), values.begin(), values.end());
    }
  }
  dataset.manifest.count = static_cast<int64_t>(dataset.rows.size());
  return dataset;
}

}  // namespace codeconcept
