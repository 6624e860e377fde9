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

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr char kManifestName[] = "manifest.json";

uint32_t ToLittleEndian(uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) |
           ((v & 0xFF0000u) >> 8) | ((v & 0xFF000000u) >> 24);
  }
}

ordered_json ManifestToJson(const ActivationManifest& m) {
  ordered_json j;
  j["format_version"] = m.format_version;
  j["model_id"] = m.model_id;
  j["layer"] = m.layer;
  if (m.num_layers) j["num_layers"] = *m.num_layers;
  j["dim"] = m.dim;
  j["count"] = m.count;
  j["dtype"] = m.dtype;
  j["byte_order"] = m.byte_order;
  j["token_table"] = m.token_table;
  j["matrix_file"] = m.matrix_file;
  return j;
}

ActivationManifest ManifestFromJson(const nlohmann::json& j) {
  ActivationManifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != kActivationFormatVersion) {
    throw FormatError("unsupported format: version " +
                      std::to_string(m.format_version));
  }
  m.model_id = j.at("model_id").get<std::string>();
  m.layer = j.at("layer").get<int>();
  if (j.contains("num_layers")) m.num_layers = j.at("num_layers").get<int>();
  m.dim = j.at("dim").get<int64_t>();
  m.count = j.at("count").get<int64_t>();
  m.dtype = j.at("dtype").get<std::string>();
  m.byte_order = j.at("byte_order").get<std::string>();
  m.token_table = j.at("token_table").get<std::string>();
  m.matrix_file = j.at("matrix_file").get<std::string>();
  return m;
}

void ValidateManifest(const ActivationManifest& m) {
  if (m.format_version != kActivationFormatVersion) {
    throw FormatError("unsupported format: version " +
                      std::to_string(m.format_version));
  }
  if (m.dtype != "f32") throw FormatError("unsupported dtype: " + m.dtype);
  if (m.byte_order != "little") {
    throw FormatError("unsupported byte order: " + m.byte_order);
  }
  if (m.dim <= 0) throw FormatError("manifest dim must be positive");
  if (m.count < 0) throw FormatError("manifest count must be non-negative");
  if (m.layer < 0) throw FormatError("manifest layer must be non-negative");
  if (m.num_layers && m.layer >= *m.num_layers) {
    throw FormatError("manifest layer " + std::to_string(m.layer) +
                      " outside model depth " +
                      std::to_string(*m.num_layers));
  }
  if (m.count > 0 && m.dim > std::numeric_limits<int64_t>::max() / 4 /
                                 m.count) {
    throw FormatError("manifest size overflows");
  }
}

}  // namespace

std::unordered_map<InstanceId, size_t, InstanceIdHash>
ActivationDataset::IndexByInstance() const {
  std::unordered_map<InstanceId, size_t, InstanceIdHash> index;
  index.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) index.emplace(rows[i].id(), i);
  return index;
}

void ValidateDataset(const ActivationDataset& dataset) {
  ValidateManifest(dataset.manifest);
  const auto& m = dataset.manifest;
  if (static_cast<int64_t>(dataset.rows.size()) != m.count) {
    throw FormatError("token table has " +
                      std::to_string(dataset.rows.size()) +
                      " rows but manifest count is " +
                      std::to_string(m.count));
  }
  if (static_cast<int64_t>(dataset.matrix.size()) != m.count * m.dim) {
    throw FormatError("matrix holds " + std::to_string(dataset.matrix.size()) +
                      " values, expected " + std::to_string(m.count * m.dim));
  }
  for (size_t i = 0; i < dataset.matrix.size(); ++i) {
    if (!std::isfinite(dataset.matrix[i])) {
      throw FormatError("non-finite activation at row " +
                        std::to_string(i / dataset.dim()) + ", column " +
                        std::to_string(i % dataset.dim()));
    }
  }
  std::unordered_set<InstanceId, InstanceIdHash> seen;
  for (const auto& row : dataset.rows) {
    if (!seen.insert(row.id()).second) {
      throw FormatError("duplicate token-table row " + row.snippet_id + "#" +
                        std::to_string(row.token_idx));
    }
  }
}

void WriteActivations(const ActivationDataset& dataset,
                      const fs::path& directory) {
  ValidateDataset(dataset);
  const auto& m = dataset.manifest;
  fs::create_directories(directory);

  {
    std::ofstream out(directory / m.matrix_file, std::ios::binary);
    if (!out) throw DataError("cannot write " + (directory / m.matrix_file).string());
    std::vector<uint32_t> words(dataset.matrix.size());
    for (size_t i = 0; i < words.size(); ++i) {
      words[i] = ToLittleEndian(std::bit_cast<uint32_t>(dataset.matrix[i]));
    }
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * sizeof(uint32_t)));
    if (!out) throw DataError("write failed: " + m.matrix_file);
  }
  {
    std::ofstream out(directory / m.token_table, std::ios::binary);
    if (!out) throw DataError("cannot write " + m.token_table);
    for (const auto& row : dataset.rows) {
      ordered_json j;
      j["snippet_id"] = row.snippet_id;
      j["token_idx"] = row.token_idx;
      j["text"] = row.text;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(directory / kManifestName, std::ios::binary);
    if (!out) throw DataError("cannot write manifest");
    out << ManifestToJson(m).dump(2) << '\n';
  }
}

ActivationDataset ReadActivations(const fs::path& path) {
  const fs::path manifest_path =
      fs::is_directory(path) ? path / kManifestName : path;
  const fs::path base = manifest_path.parent_path();
  std::ifstream manifest_in(manifest_path);
  if (!manifest_in) {
    throw FormatError("missing manifest: " + manifest_path.string());
  }

  ActivationDataset dataset;
  try {
    dataset.manifest = ManifestFromJson(nlohmann::json::parse(manifest_in));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed manifest " + manifest_path.string() + ": " +
                      e.what());
  }
  ValidateManifest(dataset.manifest);
  const auto& m = dataset.manifest;

  const fs::path matrix_path = base / m.matrix_file;
  std::error_code ec;
  const auto actual = fs::file_size(matrix_path, ec);
  if (ec) throw FormatError("corrupt matrix: cannot stat " + matrix_path.string());
  const auto expected = static_cast<uintmax_t>(m.count * m.dim * 4);
  if (actual != expected) {
    throw FormatError("corrupt matrix: " + matrix_path.string() +
                      " expected " + std::to_string(expected) +
                      " bytes (count " + std::to_string(m.count) + " x dim " +
                      std::to_string(m.dim) + " x 4), found " +
                      std::to_string(actual));
  }

  std::vector<uint32_t> words(static_cast<size_t>(m.count * m.dim));
  {
    std::ifstream in(matrix_path, std::ios::binary);
    in.read(reinterpret_cast<char*>(words.data()),
            static_cast<std::streamsize>(expected));
    if (!in && expected > 0) throw FormatError("corrupt matrix: short read");
  }
  dataset.matrix.resize(words.size());
  for (size_t i = 0; i < words.size(); ++i) {
    dataset.matrix[i] = std::bit_cast<float>(ToLittleEndian(words[i]));
  }

  std::ifstream table(base / m.token_table);
  if (!table) throw FormatError("missing token table: " + m.token_table);
  std::string line;
  while (std::getline(table, line)) {
    if (line.empty()) continue;
    if (static_cast<int64_t>(dataset.rows.size()) >= m.count) {
      throw FormatError("token table has more rows than manifest count " +
                        std::to_string(m.count));
    }
    try {
      const auto j = nlohmann::json::parse(line);
      dataset.rows.push_back({j.at("snippet_id").get<std::string>(),
                              j.at("token_idx").get<int32_t>(),
                              j.at("text").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("malformed token table row " +
                        std::to_string(dataset.rows.size()) + ": " + e.what());
    }
  }
  ValidateDataset(dataset);
  return dataset;
}

std::vector<AttributionRecord> ReadAttributions(
    const fs::path& path,
    const std::optional<std::map<std::string, size_t>>& token_counts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read attributions " + path.string());
  std::vector<AttributionRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    AttributionRecord record;
    try {
      const auto j = nlohmann::json::parse(line);
      record.snippet_id = j.at("snippet_id").get<std::string>();
      record.predicted_label = j.at("predicted_label").get<std::string>();
      record.true_label = j.at("true_label").get<std::string>();
      record.scores = j.at("scores").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("attributions line " + std::to_string(line_no) +
                        ": " + e.what());
    }
    for (double s : record.scores) {
      if (!std::isfinite(s)) {
        throw FormatError("non-finite attribution score for snippet " +
                          record.snippet_id);
      }
    }
    if (token_counts) {
      auto it = token_counts->find(record.snippet_id);
      if (it == token_counts->end()) {
        throw DataError("attribution record for unknown snippet " +
                        record.snippet_id);
      }
      if (it->second != record.scores.size()) {
        throw DataError("snippet " + record.snippet_id + " has " +
                        std::to_string(it->second) + " tokens but " +
                        std::to_string(record.scores.size()) +
                        " attribution scores");
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

void WriteAttributions(const std::vector<AttributionRecord>& records,
                       const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : records) {
    ordered_json j;
    j["snippet_id"] = r.snippet_id;
    j["predicted_label"] = r.predicted_label;
    j["true_label"] = r.true_label;
    j["scores"] = r.scores;
    out << j.dump() << '\n';
  }
}

}  // namespace codeconcept
