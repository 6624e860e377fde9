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

#ifndef CODECONCEPT_ACTIVATION_IO_H_
#define CODECONCEPT_ACTIVATION_IO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "codeconcept/corpus.h"

namespace codeconcept {

inline constexpr int kActivationFormatVersion = 1;

// On-disk layout (one file-set per model layer):
//
//   manifest.json   JSON object, keys in this order:
//                     format_version  int, currently 1
//                     model_id        string
//                     layer           int >= 0
//                     num_layers      int, optional; when present layer < it
//                     dim             int > 0
//                     count           int >= 0
//                     dtype           "f32"
//                     byte_order      "little"
//                     token_table     path relative to the manifest
//                     matrix_file     path relative to the manifest
//   <matrix_file>   count * dim IEEE-754 binary32 values, little-endian,
//                   row-major, no header. Size is exactly count*dim*4 bytes.
//   <token_table>   JSON Lines, row i describes matrix row i:
//                     {"snippet_id": str, "token_idx": int, "text": str}
struct ActivationManifest {
  int format_version = kActivationFormatVersion;
  std::string model_id;
  int layer = 0;
  std::optional<int> num_layers;
  int64_t dim = 0;
  int64_t count = 0;
  std::string dtype = "f32";
  std::string byte_order = "little";
  std::string token_table = "tokens.jsonl";
  std::string matrix_file = "matrix.f32";

  bool operator==(const ActivationManifest&) const = default;
};

struct ActivationRow {
  std::string snippet_id;
  int32_t token_idx = 0;
  std::string text;

  InstanceId id() const { return {snippet_id, token_idx}; }
  bool operator==(const ActivationRow&) const = default;
};

struct ActivationDataset {
  ActivationManifest manifest;
  std::vector<ActivationRow> rows;
  std::vector<float> matrix;  // rows.size() x manifest.dim, row-major

  size_t size() const { return rows.size(); }
  size_t dim() const { return static_cast<size_t>(manifest.dim); }
  std::span<const float> Row(size_t i) const {
    return {matrix.data() + i * dim(), dim()};
  }
  // Row index per instance.
  std::unordered_map<InstanceId, size_t, InstanceIdHash> IndexByInstance()
      const;

  bool operator==(const ActivationDataset&) const = default;
};

// Throws FormatError naming the first violated invariant.
void ValidateDataset(const ActivationDataset& dataset);

// Writes manifest.json plus the matrix and token table into `directory`.
// Refuses (FormatError) to write a dataset that fails validation.
void WriteActivations(const ActivationDataset& dataset,
                      const std::filesystem::path& directory);

// Accepts either the manifest file or the directory containing
// manifest.json. Sizes are checked against the manifest before any body is
// read.
ActivationDataset ReadActivations(const std::filesystem::path& path);

struct AttributionRecord {
  std::string snippet_id;
  std::string predicted_label;
  std::string true_label;
  std::vector<double> scores;  // one per token instance of the snippet

  bool operator==(const AttributionRecord&) const = default;
};

// JSON Lines, one record per snippet:
// {"snippet_id","predicted_label","true_label","scores":[...]}.
// When `token_counts` is given, each record's score count must match the
// snippet's token count and the snippet must be known.
std::vector<AttributionRecord> ReadAttributions(
    const std::filesystem::path& path,
    const std::optional<std::map<std::string, size_t>>& token_counts =
        std::nullopt);

void WriteAttributions(const std::vector<AttributionRecord>& records,
                       const std::filesystem::path& path);

}  // namespace codeconcept

#endif  // CODECONCEPT_ACTIVATION_IO_H_
