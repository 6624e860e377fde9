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

#include "codeconcept/attribution.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "codeconcept/errors.h"
#include "codeconcept/float_block.h"

namespace codeconcept {
namespace {

// Softmax of `logits` in place, shifted by the max for stability.
void Softmax(std::vector<double>& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - top);
    sum += z;
  }
  for (double& z : logits) z /= sum;
}

std::string JoinWords(const std::vector<std::string>& words, size_t cap,
                      std::string* note) {
  std::string out;
  const size_t shown = std::min(words.size(), cap);
  for (size_t i = 0; i < shown; ++i) {
    if (i > 0) out += ", ";
    out += words[i];
  }
  if (shown < words.size() && note != nullptr) {
    *note = "(showing " + std::to_string(shown) + " of " +
            std::to_string(words.size()) + " cluster words)";
  }
  return out;
}

}  // namespace

SalientSelection SelectSalient(const AttributionRecord& record, double p) {
  if (record.scores.empty()) {
    throw DataError("no attribution scores for snippet " + record.snippet_id);
  }
  SalientSelection selection;
  selection.snippet_id = record.snippet_id;
  selection.p = p;
  double total = 0.0;
  for (double s : record.scores) total += std::abs(s);
  if (total <= 0.0) {
    throw DataError("no attribution mass for snippet " + record.snippet_id);
  }
  selection.normalized.reserve(record.scores.size());
  for (double s : record.scores) selection.normalized.push_back(std::abs(s) / total);

  std::vector<int32_t> order(record.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    return selection.normalized[a] > selection.normalized[b];
  });
  for (int32_t idx : order) {
    selection.selected.push_back(idx);
    selection.cumulative += selection.normalized[idx];
    // Guard against the normalized masses summing to slightly under 1.
    if (selection.cumulative >= p - 1e-12) break;
  }
  return selection;
}

double SoftmaxObjective(const LabeledFeatures& data,
                        std::span<const double> params, double l2,
                        std::vector<double>* gradient) {
  const size_t k = data.k;
  const size_t dim = data.dim;
  const size_t n = data.size();
  const double* w = params.data();
  const double* b = params.data() + k * dim;
  if (gradient != nullptr) gradient->assign(params.size(), 0.0);

  double loss = 0.0;
  std::vector<double> logits(k);
  for (size_t i = 0; i < n; ++i) {
    const double* x = data.features.data() + i * dim;
    for (size_t c = 0; c < k; ++c) {
      double z = b[c];
      for (size_t j = 0; j < dim; ++j) z += w[c * dim + j] * x[j];
      logits[c] = z;
    }
    Softmax(logits);
    const auto y = static_cast<size_t>(data.labels[i]);
    loss -= std::log(std::max(logits[y], 1e-300));
    if (gradient != nullptr) {
      for (size_t c = 0; c < k; ++c) {
        const double delta = logits[c] - (c == y ? 1.0 : 0.0);
        for (size_t j = 0; j < dim; ++j) (*gradient)[c * dim + j] += delta * x[j];
        (*gradient)[k * dim + c] += delta;
      }
    }
  }
  const double inv_n = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  loss *= inv_n;
  double norm = 0.0;
  for (size_t i = 0; i < k * dim; ++i) norm += w[i] * w[i];
  loss += 0.5 * l2 * norm;
  if (gradient != nullptr) {
    for (auto& g : *gradient) g *= inv_n;
    for (size_t i = 0; i < k * dim; ++i) (*gradient)[i] += l2 * w[i];
  }
  return loss;
}

ConceptClassifier::ConceptClassifier(std::vector<int> cluster_ids, size_t dim)
    : cluster_ids_(std::move(cluster_ids)),
      dim_(dim),
      weights_(cluster_ids_.size() * dim, 0.0),
      bias_(cluster_ids_.size(), 0.0),
      feature_mean_(dim, 0.0),
      feature_scale_(dim, 1.0) {}

std::vector<double> ConceptClassifier::Probabilities(
    std::span<const float> activation) const {
  if (activation.size() != dim_) {
    throw DataError("activation has dimension " +
                    std::to_string(activation.size()) + ", classifier expects " +
                    std::to_string(dim_));
  }
  std::vector<double> logits(k());
  for (size_t c = 0; c < k(); ++c) {
    double z = bias_[c];
    for (size_t j = 0; j < dim_; ++j) {
      const double x = (activation[j] - feature_mean_[j]) / feature_scale_[j];
      z += weights_[c * dim_ + j] * x;
    }
    logits[c] = z;
  }
  Softmax(logits);
  return logits;
}

std::pair<int, std::vector<double>> ConceptClassifier::Predict(
    std::span<const float> activation) const {
  std::vector<double> probs = Probabilities(activation);
  size_t best = 0;
  for (size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best] ||
        (probs[c] == probs[best] && cluster_ids_[c] < cluster_ids_[best])) {
      best = c;
    }
  }
  return {cluster_ids_[best], std::move(probs)};
}

TrainingStats ConceptClassifier::Fit(const LabeledFeatures& raw,
                                     const ClassifierConfig& config) {
  config_ = config;
  const size_t n = raw.size();
  LabeledFeatures data = raw;
  for (size_t j = 0; j < dim_; ++j) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += raw.features[i * dim_ + j];
    mean /= static_cast<double>(std::max<size_t>(n, 1));
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = raw.features[i * dim_ + j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(std::max<size_t>(n, 1));
    feature_mean_[j] = mean;
    feature_scale_[j] = var > 1e-16 ? std::sqrt(var) : 1.0;
    for (size_t i = 0; i < n; ++i) {
      data.features[i * dim_ + j] = (raw.features[i * dim_ + j] - mean) /
                                    feature_scale_[j];
    }
  }

  std::vector<double> params(k() * dim_ + k(), 0.0);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  for (size_t i = 0; i < k() * dim_; ++i) params[i] = init(rng);

  TrainingStats stats;
  std::vector<double> gradient;
  double previous = SoftmaxObjective(data, params, config.l2, &gradient);
  stats.loss_history.push_back(previous);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (size_t i = 0; i < params.size(); ++i) {
      params[i] -= config.learning_rate * gradient[i];
    }
    const double loss = SoftmaxObjective(data, params, config.l2, &gradient);
    if (!std::isfinite(loss)) {
      throw DataError("classifier loss became non-finite at epoch " +
                      std::to_string(epoch) + " (previous loss " +
                      std::to_string(previous) + ", learning rate " +
                      std::to_string(config.learning_rate) + ")");
    }
    stats.loss_history.push_back(loss);
    stats.epochs = epoch;
    if (std::abs(previous - loss) < config.loss_tolerance) {
      stats.converged = true;
      previous = loss;
      break;
    }
    previous = loss;
  }
  stats.final_loss = previous;
  std::copy(params.begin(), params.begin() + k() * dim_, weights_.begin());
  std::copy(params.begin() + k() * dim_, params.end(), bias_.begin());

  size_t correct = 0;
  for (size_t i = 0; i < n; ++i) {
    std::vector<float> x(raw.features.begin() + i * dim_,
                         raw.features.begin() + (i + 1) * dim_);
    correct += Predict(x).first == cluster_ids_[raw.labels[i]];
  }
  stats.accuracy = n == 0 ? 0.0 : static_cast<double>(correct) / n;
  return stats;
}

void ConceptClassifier::Save(const std::filesystem::path& manifest_path) const {
  const std::string weights_name =
      manifest_path.stem().string() + ".weights.f32";
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["k"] = k();
  j["dim"] = dim_;
  j["cluster_ids"] = cluster_ids_;
  j["source"] = source;
  j["config"] = {{"learning_rate", config_.learning_rate},
                 {"l2", config_.l2},
                 {"max_epochs", config_.max_epochs},
                 {"loss_tolerance", config_.loss_tolerance},
                 {"seed", config_.seed}};
  // Block layout: weights (k x dim), bias (k), feature mean (dim),
  // feature scale (dim), all float32 little-endian.
  j["weights_file"] = weights_name;
  {
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + manifest_path.string());
    out << j.dump(2) << '\n';
  }
  std::vector<double> block;
  block.insert(block.end(), weights_.begin(), weights_.end());
  block.insert(block.end(), bias_.begin(), bias_.end());
  block.insert(block.end(), feature_mean_.begin(), feature_mean_.end());
  block.insert(block.end(), feature_scale_.begin(), feature_scale_.end());
  std::ofstream out(manifest_path.parent_path() / weights_name, std::ios::binary);
  if (!out) throw DataError("cannot write classifier weights");
  out << PackFloat32(block);
}

ConceptClassifier ConceptClassifier::Load(
    const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot read " + manifest_path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed classifier manifest: ") + e.what());
  }
  ConceptClassifier classifier(j.at("cluster_ids").get<std::vector<int>>(),
                               j.at("dim").get<size_t>());
  classifier.source = j.value("source", "");
  const auto& c = j.at("config");
  classifier.config_ = {c.at("learning_rate").get<double>(),
                        c.at("l2").get<double>(), c.at("max_epochs").get<int>(),
                        c.at("loss_tolerance").get<double>(),
                        c.at("seed").get<uint64_t>()};
  std::ifstream win(manifest_path.parent_path() /
                        j.at("weights_file").get<std::string>(),
                    std::ios::binary);
  std::ostringstream bytes;
  bytes << win.rdbuf();
  const auto block = UnpackFloat32(bytes.str());
  const size_t k = classifier.k();
  const size_t d = classifier.dim();
  if (block.size() != k * d + k + 2 * d) {
    throw FormatError("classifier weight block has " +
                      std::to_string(block.size()) + " values, expected " +
                      std::to_string(k * d + k + 2 * d));
  }
  auto it = block.begin();
  std::copy(it, it + k * d, classifier.weights_.begin());
  it += k * d;
  std::copy(it, it + k, classifier.bias_.begin());
  it += k;
  std::copy(it, it + d, classifier.feature_mean_.begin());
  it += d;
  std::copy(it, it + d, classifier.feature_scale_.begin());
  return classifier;
}

LabeledFeatures TrainingSet(const ActivationDataset& dataset,
                            const ClusterSet& clusters) {
  LabeledFeatures data;
  data.dim = dataset.dim();
  data.k = clusters.clusters.size();
  const auto index = dataset.IndexByInstance();
  for (size_t c = 0; c < clusters.clusters.size(); ++c) {
    for (const auto& m : clusters.clusters[c].members) {
      auto it = index.find(m);
      if (it == index.end()) {
        throw DataError("cluster member " + m.snippet_id + "#" +
                        std::to_string(m.token_idx) + " has no activation row");
      }
      auto row = dataset.Row(it->second);
      data.features.insert(data.features.end(), row.begin(), row.end());
      data.labels.push_back(static_cast<int>(c));
    }
  }
  return data;
}

std::pair<ConceptClassifier, TrainingStats> TrainConceptClassifier(
    const ActivationDataset& dataset, const ClusterSet& clusters,
    const ClassifierConfig& config) {
  if (clusters.clusters.size() < 2) {
    throw DataError("concept classifier needs at least 2 clusters, got " +
                    std::to_string(clusters.clusters.size()));
  }
  LabeledFeatures data = TrainingSet(dataset, clusters);
  std::vector<int> ids;
  for (const auto& c : clusters.clusters) ids.push_back(c.id);
  ConceptClassifier classifier(std::move(ids), data.dim);
  classifier.source = clusters.source_manifest;
  TrainingStats stats = classifier.Fit(data, config);
  return {std::move(classifier), std::move(stats)};
}

std::string BuildExplanationPrompt(const ExplanationInput& input) {
  if (input.cluster_words.empty()) {
    throw DataError("cannot explain against an empty cluster");
  }
  std::string note;
  const std::string words = JoinWords(input.cluster_words, input.max_words, &note);
  std::ostringstream p;
  if (input.sentence_level) {
    p << "[CLS] tokens represent the entire sentence. This sentence is from "
      << input.language
      << " code. Explain the semantic, structural, lexical, or topical "
         "meaning in relation to the list of words from similar contexts. "
         "What cohesive meaning does this sentence share with the contextual "
         "themes?\n\n"
      << "Original Sentence: " << input.sentence << "\n"
      << "List of cluster words: " << words << "\n";
    if (!note.empty()) p << note << "\n";
    p << "\nContext Sentences of the list of cluster words:\n";
    const size_t shown = std::min(input.contexts.size(), input.max_contexts);
    if (shown == 0) p << "(no contexts)\n";
    for (size_t i = 0; i < shown; ++i) p << input.contexts[i] << "\n";
    p << "\nAnswer concisely and to the point about how these patterns are "
         "characteristic of "
      << input.language << " code.\n";
    return p.str();
  }
  p << "The task is " << input.task << ". The sentence is from "
    << input.language << " code.\n\n"
    << "Do you find any common semantic, structural, lexical and topical "
       "relation between the original token (with its position) given to you "
       "and the following list of words? Give a more specific and concise "
       "summary about the most prominent relation among these words.\n\n"
    << "Original token: " << input.token << "\n"
    << "Token's sentence: " << input.sentence << "\n"
    << "Position of the original token in the sentence: " << input.position
    << "\n"
    << "List of words (Cluster): " << words << "\n";
  if (!note.empty()) p << note << "\n";
  p << "\nDoes the List of Words (Cluster) help in predicting that this is "
    << input.language << " code? Why or why not?\n\n"
    << "Answer to the point\n";
  return p.str();
}

}  // namespace codeconcept
