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

#include "codeconcept/activation_io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "codeconcept/errors.h"
#include "json.hpp"

namespace codeconcept {
namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& leaf) {
  const auto* info = testing::UnitTest::GetInstance()->current_test_info();
  fs::path p = fs::temp_directory_path() /
               (std::string("activation_io_test_") + info->name()) / leaf;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ActivationDataset TwoByThree() {
  ActivationDataset d;
  d.manifest.model_id = "toy";
  d.manifest.dim = 3;
  d.manifest.count = 2;
  d.rows = {{"a.java", 0, "int"}, {"a.java", 1, "x"}};
  d.matrix = {1, 2, 3, 4, 5, 6};
  return d;
}

TEST(Activations, TwoByThreeByteLayout) {
  const fs::path dir = Scratch("out");
  WriteActivations(TwoByThree(), dir);
  const std::string bytes = Slurp(dir / "matrix.f32");
  ASSERT_EQ(bytes.size(), 24u);
  // IEEE-754 binary32, little-endian: 1=3F800000 2=40000000 3=40400000
  // 4=40800000 5=40A00000 6=40C00000.
  const unsigned char expected[24] = {
      0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0x40, 0x00, 0x00, 0x40, 0x40,
      0x00, 0x00, 0x80, 0x40, 0x00, 0x00, 0xA0, 0x40, 0x00, 0x00, 0xC0, 0x40};
  for (size_t i = 0; i < 24; ++i) {
    EXPECT_EQ(static_cast<unsigned char>(bytes[i]), expected[i]) << "byte " << i;
  }
  EXPECT_EQ(ReadActivations(dir), TwoByThree());
  EXPECT_EQ(ReadActivations(dir / "manifest.json"), TwoByThree());
}

TEST(Activations, EmptyDatasetRoundTrips) {
  ActivationDataset d;
  d.manifest.dim = 4;
  const fs::path dir = Scratch("out");
  WriteActivations(d, dir);
  EXPECT_EQ(fs::file_size(dir / "matrix.f32"), 0u);
  EXPECT_EQ(ReadActivations(dir), d);
}

TEST(Activations, FilesRoundTripByteExactly) {
  std::mt19937_64 rng(7);
  std::normal_distribution<float> normal;
  ActivationDataset d;
  d.manifest.model_id = "random";
  d.manifest.layer = 3;
  d.manifest.num_layers = 12;
  d.manifest.dim = 16;
  for (int i = 0; i < 100; ++i) {
    d.rows.push_back({"s" + std::to_string(i / 10) + ".java", i % 10,
                      "tok\"" + std::to_string(i)});
    for (int j = 0; j < 16; ++j) d.matrix.push_back(normal(rng));
  }
  d.manifest.count = 100;
  const fs::path first = Scratch("first");
  const fs::path second = Scratch("second");
  WriteActivations(d, first);
  const ActivationDataset back = ReadActivations(first);
  EXPECT_EQ(back, d);
  WriteActivations(back, second);
  for (const char* name : {"manifest.json", "matrix.f32", "tokens.jsonl"}) {
    EXPECT_EQ(Slurp(first / name), Slurp(second / name)) << name;
  }
}

TEST(Activations, NanIsRefused) {
  ActivationDataset d = TwoByThree();
  d.matrix[4] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(WriteActivations(d, Scratch("out")), FormatError);
}

TEST(Activations, TruncatedMatrixIsCorrupt) {
  const fs::path dir = Scratch("out");
  WriteActivations(TwoByThree(), dir);
  fs::resize_file(dir / "matrix.f32", 20);
  try {
    ReadActivations(dir);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("corrupt matrix"), std::string::npos);
  }
}

TEST(Activations, DimMismatchNamesBothByteCounts) {
  const fs::path dir = Scratch("out");
  WriteActivations(TwoByThree(), dir);
  auto manifest = nlohmann::ordered_json::parse(Slurp(dir / "manifest.json"));
  manifest["dim"] = 4;
  std::ofstream(dir / "manifest.json") << manifest.dump(2);
  try {
    ReadActivations(dir);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string message = e.what();
    // 2 rows x 4 dims x 4 bytes expected; 2 x 3 x 4 on disk.
    EXPECT_NE(message.find("expected 32 bytes"), std::string::npos) << message;
    EXPECT_NE(message.find("found 24"), std::string::npos) << message;
  }
}

TEST(Activations, UnknownVersionIsUnsupported) {
  const fs::path dir = Scratch("out");
  WriteActivations(TwoByThree(), dir);
  auto manifest = nlohmann::ordered_json::parse(Slurp(dir / "manifest.json"));
  manifest["format_version"] = 99;
  std::ofstream(dir / "manifest.json") << manifest.dump(2);
  try {
    ReadActivations(dir);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported format"), std::string::npos);
  }
}

TEST(Activations, OversizeBodyRejectedBeforeReading) {
  const fs::path dir = Scratch("out");
  WriteActivations(TwoByThree(), dir);
  std::ofstream(dir / "matrix.f32", std::ios::app | std::ios::binary) << "xxxx";
  EXPECT_THROW(ReadActivations(dir), FormatError);
}

TEST(Attributions, MatchingCountAccepted) {
  const fs::path path = Scratch("a.jsonl");
  WriteAttributions({{"s.java", "Java", "Java", {0.1, -0.2, 0.3}}}, path);
  const auto records =
      ReadAttributions(path, std::map<std::string, size_t>{{"s.java", 3}});
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].scores, (std::vector<double>{0.1, -0.2, 0.3}));
}

TEST(Attributions, ShortRecordNamesTheSnippet) {
  const fs::path path = Scratch("a.jsonl");
  WriteAttributions({{"s.java", "Java", "Java", {0.1, 0.2}}}, path);
  try {
    ReadAttributions(path, std::map<std::string, size_t>{{"s.java", 3}});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("s.java"), std::string::npos);
  }
}

TEST(Attributions, EmptyFileIsEmptyList) {
  const fs::path path = Scratch("a.jsonl");
  std::ofstream(path).close();
  EXPECT_TRUE(ReadAttributions(path).empty());
}

TEST(Attributions, FileRoundTripsByteExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<AttributionRecord> records;
  for (int i = 0; i < 20; ++i) {
    AttributionRecord r{"s" + std::to_string(i), "Java", i % 2 ? "C" : "Java", {}};
    for (int j = 0; j < 1 + i; ++j) r.scores.push_back(u(rng));
    records.push_back(r);
  }
  const fs::path first = Scratch("first.jsonl");
  const fs::path second = Scratch("second.jsonl");
  WriteAttributions(records, first);
  const auto back = ReadAttributions(first);
  EXPECT_EQ(back, records);
  WriteAttributions(back, second);
  EXPECT_EQ(Slurp(first), Slurp(second));
}

TEST(Attributions, MalformedLineIsFormatError) {
  const fs::path path = Scratch("a.jsonl");
  std::ofstream(path) << "{\"snippet_id\": \"s\", \"scores\": [1,\n";
  EXPECT_THROW(ReadAttributions(path), FormatError);
}

}  // namespace
}  // namespace codeconcept
