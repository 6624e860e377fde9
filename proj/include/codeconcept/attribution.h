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

#ifndef CODECONCEPT_ATTRIBUTION_H_
#define CODECONCEPT_ATTRIBUTION_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "codeconcept/activation_io.h"
#include "codeconcept/discovery.h"

namespace codeconcept {

struct SalientSelection {
  std::string snippet_id;
  double p = 0.5;
  std::vector<int32_t> selected;    // token indices, most salient first
  std::vector<double> normalized;   // |score| / sum |score|, per token
  double cumulative = 0.0;          // mass of the selected prefix
};

// Minimal prefix of tokens ranked by |score| (ties by token index) whose
// normalized mass reaches p. Throws DataError for empty or all-zero scores.
SalientSelection SelectSalient(const AttributionRecord& record, double p);

struct ClassifierConfig {
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int max_epochs = 2000;
  double loss_tolerance = 1e-7;
  uint64_t seed = 42;
};

// Training data for softmax regression: n x dim features, labels in [0, k).
struct LabeledFeatures {
  std::vector<double> features;
  std::vector<int> labels;
  size_t dim = 0;
  size_t k = 0;

  size_t size() const { return labels.size(); }
};

// Mean cross-entropy of softmax(W x + b) plus (l2 / 2) |W|^2. Parameters are
// W (k x dim, row-major) followed by b (k). Fills `gradient` when non-null.
double SoftmaxObjective(const LabeledFeatures& data,
                        std::span<const double> params, double l2,
                        std::vector<double>* gradient);

struct TrainingStats {
  int epochs = 0;
  bool converged = false;
  double final_loss = 0.0;
  double accuracy = 0.0;
  std::vector<double> loss_history;
};

class ConceptClassifier {
 public:
  ConceptClassifier() = default;
  ConceptClassifier(std::vector<int> cluster_ids, size_t dim);

  size_t k() const { return cluster_ids_.size(); }
  size_t dim() const { return dim_; }
  const std::vector<int>& cluster_ids() const { return cluster_ids_; }
  std::vector<double>& weights() { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  const ClassifierConfig& config() const { return config_; }

  // Softmax over clusters for a raw activation vector. Throws DataError on
  // dimension mismatch.
  std::vector<double> Probabilities(std::span<const float> activation) const;

  // Most probable cluster id (ties to the lower id) and the distribution.
  std::pair<int, std::vector<double>> Predict(
      std::span<const float> activation) const;

  // Full-batch gradient descent on standardized features.
  TrainingStats Fit(const LabeledFeatures& raw, const ClassifierConfig& config);

  void Save(const std::filesystem::path& manifest_path) const;
  static ConceptClassifier Load(const std::filesystem::path& manifest_path);

  std::string source;  // cluster set the classifier was trained from

 private:
  std::vector<int> cluster_ids_;
  size_t dim_ = 0;
  std::vector<double> weights_;  // k x dim, applied to standardized inputs
  std::vector<double> bias_;
  std::vector<double> feature_mean_;
  std::vector<double> feature_scale_;
  ClassifierConfig config_;
};

// Pairs each kept cluster member with its activation row. Throws DataError
// when a member has no row.
LabeledFeatures TrainingSet(const ActivationDataset& dataset,
                            const ClusterSet& clusters);

// Trains on every kept cluster. Throws DataError for fewer than 2 clusters
// and for a non-finite loss.
std::pair<ConceptClassifier, TrainingStats> TrainConceptClassifier(
    const ActivationDataset& dataset, const ClusterSet& clusters,
    const ClassifierConfig& config = {});

struct ExplanationInput {
  std::string task = "Programming Language Classification";
  std::string language;  // predicted label, e.g. "PHP"
  std::string token;
  std::string sentence;
  int position = 0;
  std::vector<std::string> cluster_words;
  std::vector<std::string> contexts;  // used by the sentence-level variant
  bool sentence_level = false;
  size_t max_words = 50;
  size_t max_contexts = 12;
};

// Throws DataError when cluster_words is empty.
std::string BuildExplanationPrompt(const ExplanationInput& input);

}  // namespace codeconcept

#endif  // CODECONCEPT_ATTRIBUTION_H_
