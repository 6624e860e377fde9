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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

AttributionRecord Record(std::vector<double> scores) {
  return {"s.java", "Java", "Java", std::move(scores)};
}

TEST(SelectSalient, BoundaryIsInclusive) {
  const auto s = SelectSalient(Record({0.5, 0.3, 0.2}), 0.5);
  EXPECT_EQ(s.selected, (std::vector<int32_t>{0}));
  EXPECT_DOUBLE_EQ(s.cumulative, 0.5);
}

TEST(SelectSalient, TwoTokensNeeded) {
  EXPECT_EQ(SelectSalient(Record({0.4, 0.35, 0.25}), 0.5).selected,
            (std::vector<int32_t>{0, 1}));
}

TEST(SelectSalient, SingleTokenAlwaysSelected) {
  for (double p : {0.01, 0.5, 1.0}) {
    EXPECT_EQ(SelectSalient(Record({-3.0}), p).selected, (std::vector<int32_t>{0}));
  }
}

TEST(SelectSalient, UsesMagnitudesAndBreaksTiesByIndex) {
  const auto s = SelectSalient(Record({0.1, -0.4, 0.4, 0.1}), 0.9);
  EXPECT_EQ(s.selected, (std::vector<int32_t>{1, 2, 0}));
}

TEST(SelectSalient, ZeroMassIsAnError) {
  try {
    SelectSalient(Record({0.0, 0.0}), 0.5);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no attribution mass"), std::string::npos);
  }
  EXPECT_THROW(SelectSalient(Record({}), 0.5), DataError);
}

TEST(SelectSalient, RandomVectorsSelectMinimalPrefix) {
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double p = 0.5;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = std::uniform_int_distribution<size_t>(1, 40)(rng);
    std::vector<double> scores(n);
    for (auto& v : scores) v = u(rng);
    if (trial % 10 == 0 && n > 2) scores[1] = scores[0];  // exercise ties
    const auto s = SelectSalient(Record(scores), p);

    // Independent ranking: selection sort on (|score| desc, index asc).
    std::vector<bool> used(n, false);
    std::vector<size_t> order;
    for (size_t r = 0; r < n; ++r) {
      size_t best = n;
      for (size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        if (best == n || std::fabs(scores[i]) > std::fabs(scores[best])) best = i;
      }
      used[best] = true;
      order.push_back(best);
    }
    long double total = 0;
    for (double v : scores) total += std::fabs(v);
    long double mass = 0;
    size_t expected = 0;
    while (mass < p * total) mass += std::fabs(scores[order[expected++]]);

    ASSERT_EQ(s.selected.size(), expected) << "trial " << trial;
    for (size_t i = 0; i < expected; ++i) {
      ASSERT_EQ(s.selected[i], static_cast<int32_t>(order[i])) << "trial " << trial;
    }
    // Minimality: dropping the last selected token falls below p.
    double without_last = 0;
    for (size_t i = 0; i + 1 < s.selected.size(); ++i) {
      without_last += s.normalized[static_cast<size_t>(s.selected[i])];
    }
    EXPECT_LT(without_last, p);
    EXPECT_GE(s.cumulative, p - 1e-12);
    EXPECT_NEAR(std::accumulate(s.normalized.begin(), s.normalized.end(), 0.0), 1.0, 1e-12);
  }
}

LabeledFeatures TwoBlobs(size_t per_blob, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  LabeledFeatures data;
  data.dim = 2;
  data.k = 2;
  for (size_t i = 0; i < 2 * per_blob; ++i) {
    const int label = static_cast<int>(i % 2);
    const double center = label == 0 ? -3.0 : 3.0;
    data.features.push_back(center + noise(rng));
    data.features.push_back(center + noise(rng));
    data.labels.push_back(label);
  }
  return data;
}

double Accuracy(const ConceptClassifier& c, const LabeledFeatures& data) {
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const std::vector<float> x(data.features.begin() + static_cast<long>(i * data.dim),
                               data.features.begin() + static_cast<long>((i + 1) * data.dim));
    correct += c.Predict(x).first == c.cluster_ids()[static_cast<size_t>(data.labels[i])];
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TEST(ConceptClassifier, SeparableBlobsWithinEpochBudget) {
  const LabeledFeatures data = TwoBlobs(100, 3);
  ConceptClassifier classifier({7, 9}, 2);
  ClassifierConfig config;
  config.max_epochs = 1999;
  const TrainingStats stats = classifier.Fit(data, config);
  EXPECT_LE(stats.epochs, 1999);
  EXPECT_GE(stats.accuracy, 0.99);
  EXPECT_GE(Accuracy(classifier, data), 0.99);
  // A training point lands in its own cluster with high probability.
  const std::vector<float> x = {static_cast<float>(data.features[0]),
                                static_cast<float>(data.features[1])};
  const auto [id, probs] = classifier.Predict(x);
  EXPECT_EQ(id, 7);
  EXPECT_GT(probs[0], 0.9);
}

TEST(ConceptClassifier, LossDecreasesMonotonically) {
  const LabeledFeatures data = TwoBlobs(30, 5);
  ConceptClassifier classifier({0, 1}, 2);
  ClassifierConfig config;
  config.learning_rate = 0.05;
  config.max_epochs = 300;
  const TrainingStats stats = classifier.Fit(data, config);
  for (size_t i = 1; i < stats.loss_history.size(); ++i) {
    EXPECT_LE(stats.loss_history[i], stats.loss_history[i - 1] + 1e-15) << i;
  }
}

TEST(SoftmaxObjective, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> normal;
  LabeledFeatures data;
  data.dim = 3;
  data.k = 3;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 3; ++j) data.features.push_back(normal(rng));
    data.labels.push_back(i % 3);
  }
  std::vector<double> params(data.k * data.dim + data.k);
  for (auto& v : params) v = normal(rng);
  const double l2 = 0.1;
  std::vector<double> gradient;
  SoftmaxObjective(data, params, l2, &gradient);
  ASSERT_EQ(gradient.size(), params.size());
  double worst = 0;
  const double h = 1e-5;
  for (size_t i = 0; i < params.size(); ++i) {
    std::vector<double> plus = params;
    std::vector<double> minus = params;
    plus[i] += h;
    minus[i] -= h;
    const double numeric = (SoftmaxObjective(data, plus, l2, nullptr) -
                            SoftmaxObjective(data, minus, l2, nullptr)) /
                           (2 * h);
    const double scale = std::max({std::fabs(numeric), std::fabs(gradient[i]), 1e-8});
    worst = std::max(worst, std::fabs(numeric - gradient[i]) / scale);
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(ConceptClassifier, ProbabilitiesSumToOne) {
  const LabeledFeatures data = TwoBlobs(20, 8);
  ConceptClassifier classifier({0, 1}, 2);
  classifier.Fit(data, {});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<float> x = {u(rng), u(rng)};
    const auto probs = classifier.Probabilities(x);
    EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(ConceptClassifier, ZeroParametersGiveUniform) {
  ConceptClassifier classifier({3, 5, 8, 13}, 3);
  const std::vector<float> x = {1.0f, -2.0f, 0.5f};
  const auto [id, probs] = classifier.Predict(x);
  for (double p : probs) EXPECT_DOUBLE_EQ(p, 0.25);
  EXPECT_EQ(id, 3);  // ties go to the lower id
}

TEST(ConceptClassifier, DimensionMismatchIsAnError) {
  ConceptClassifier classifier({0, 1}, 3);
  const std::vector<float> x = {1.0f, 2.0f};
  EXPECT_THROW(classifier.Predict(x), DataError);
}

TEST(ConceptClassifier, SaveLoadPreservesPredictions) {
  const LabeledFeatures data = TwoBlobs(20, 9);
  ConceptClassifier classifier({4, 6}, 2);
  classifier.Fit(data, {});
  classifier.source = "clusters.json";
  const auto dir = std::filesystem::temp_directory_path() / "attribution_test_save";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  classifier.Save(dir / "clf.json");
  const ConceptClassifier back = ConceptClassifier::Load(dir / "clf.json");
  EXPECT_EQ(back.cluster_ids(), classifier.cluster_ids());
  EXPECT_EQ(back.source, "clusters.json");
  // Parameters are stored as float32.
  for (size_t i = 0; i < classifier.weights().size(); ++i) {
    EXPECT_EQ(back.weights()[i],
              static_cast<double>(static_cast<float>(classifier.weights()[i])));
  }
  const std::vector<float> x = {0.3f, -1.2f};
  const auto expected = classifier.Probabilities(x);
  const auto actual = back.Probabilities(x);
  for (size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(actual[i], expected[i], 1e-6);
  EXPECT_EQ(back.Predict(x).first, classifier.Predict(x).first);
  std::filesystem::remove_all(dir);
}

ActivationDataset BlobDataset(ClusterSet* clusters, size_t k) {
  ActivationDataset d;
  d.manifest.dim = 2;
  clusters->k = static_cast<int>(k);
  clusters->dim = 2;
  std::mt19937_64 rng(6);
  std::normal_distribution<float> noise(0, 0.3f);
  for (size_t c = 0; c < k; ++c) clusters->clusters.push_back({static_cast<int>(c) * 2, {}});
  for (int i = 0; i < 60; ++i) {
    const size_t c = static_cast<size_t>(i) % k;
    d.rows.push_back({"s.java", i, "t"});
    d.matrix.push_back(static_cast<float>(c) * 5 + noise(rng));
    d.matrix.push_back(noise(rng));
    clusters->clusters[c].members.push_back({"s.java", i});
  }
  d.manifest.count = 60;
  return d;
}

TEST(TrainConceptClassifier, TrainsOnClusterMembers) {
  ClusterSet clusters;
  const ActivationDataset d = BlobDataset(&clusters, 3);
  const auto [classifier, stats] = TrainConceptClassifier(d, clusters);
  EXPECT_EQ(classifier.cluster_ids(), (std::vector<int>{0, 2, 4}));
  EXPECT_GE(stats.accuracy, 0.99);
}

TEST(TrainConceptClassifier, RejectsSingleCluster) {
  ClusterSet clusters;
  const ActivationDataset d = BlobDataset(&clusters, 1);
  EXPECT_THROW(TrainConceptClassifier(d, clusters), DataError);
}

TEST(TrainConceptClassifier, MissingRowIsAnError) {
  ClusterSet clusters;
  const ActivationDataset d = BlobDataset(&clusters, 2);
  clusters.clusters[0].members.push_back({"other.java", 0});
  EXPECT_THROW(TrainingSet(d, clusters), DataError);
}

TEST(ExplanationPrompt, TokenVariantNamesTokenPositionAndCluster) {
  ExplanationInput input;
  input.language = "PHP";
  input.token = "<";
  input.sentence = "<?php echo $x; ?>";
  input.position = 0;
  input.cluster_words = {"<?php", "<?", "<"};
  const std::string prompt = BuildExplanationPrompt(input);
  EXPECT_NE(prompt.find("Original token: <"), std::string::npos);
  EXPECT_NE(prompt.find("Position of the original token in the sentence: 0"),
            std::string::npos);
  EXPECT_NE(prompt.find("<?php, <?, <"), std::string::npos);
  EXPECT_NE(prompt.find("PHP"), std::string::npos);
  EXPECT_NE(prompt.find("Do you find any common semantic, structural, lexical and topical relation"),
            std::string::npos);
  EXPECT_EQ(prompt, BuildExplanationPrompt(input));
}

TEST(ExplanationPrompt, SentenceVariantListsContexts) {
  ExplanationInput input;
  input.language = "Java";
  input.sentence = "int x = 1;";
  input.sentence_level = true;
  input.cluster_words = {"int", "long"};
  input.contexts = {"int a;", "long b;", "int c = 2;"};
  const std::string prompt = BuildExplanationPrompt(input);
  for (const auto& c : input.contexts) EXPECT_NE(prompt.find(c), std::string::npos) << c;
  EXPECT_NE(prompt.find("[CLS]"), std::string::npos);
  EXPECT_EQ(prompt.find("Original token:"), std::string::npos);
}

TEST(ExplanationPrompt, LongClusterIsTruncatedWithNote) {
  ExplanationInput input;
  input.language = "Java";
  input.token = "x";
  input.sentence = "x = 1;";
  for (int i = 0; i < 500; ++i) input.cluster_words.push_back("w" + std::to_string(i));
  const std::string prompt = BuildExplanationPrompt(input);
  EXPECT_NE(prompt.find("w49"), std::string::npos);
  EXPECT_EQ(prompt.find("w50,"), std::string::npos);
  EXPECT_EQ(prompt.find("w499"), std::string::npos);
  EXPECT_NE(prompt.find("(showing 50 of 500 cluster words)"), std::string::npos);
}

TEST(ExplanationPrompt, EmptyClusterIsAnError) {
  ExplanationInput input;
  input.token = "x";
  EXPECT_THROW(BuildExplanationPrompt(input), DataError);
}

}  // namespace
}  // namespace codeconcept
