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

#include "codeconcept/float_block.h"

#include <bit>
#include <cstdint>

#include <boost/beast/core/detail/base64.hpp>

#include "codeconcept/errors.h"

namespace codeconcept {
namespace {

namespace b64 = boost::beast::detail::base64;

void AppendLittleEndian(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
}

}  // namespace

std::string PackFloat32(std::span<const double> values) {
  std::string out;
  out.reserve(values.size() * 4);
  for (double v : values) {
    AppendLittleEndian(out, std::bit_cast<uint32_t>(static_cast<float>(v)));
  }
  return out;
}

std::string PackFloat32(std::span<const float> values) {
  std::string out;
  out.reserve(values.size() * 4);
  for (float v : values) AppendLittleEndian(out, std::bit_cast<uint32_t>(v));
  return out;
}

std::vector<float> UnpackFloat32(std::string_view bytes) {
  if (bytes.size() % 4 != 0) {
    throw FormatError("float32 block length " + std::to_string(bytes.size()) +
                      " is not a multiple of 4");
  }
  std::vector<float> out(bytes.size() / 4);
  for (size_t i = 0; i < out.size(); ++i) {
    uint32_t v = 0;
    for (int b = 0; b < 4; ++b) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[4 * i + b]))
           << (8 * b);
    }
    out[i] = std::bit_cast<float>(v);
  }
  return out;
}

std::string Base64Encode(std::string_view bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::string Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatError("malformed base64 block");
  size_t body = text.size();
  while (body > 0 && text.size() - body < 2 && text[body - 1] == '=') --body;
  std::string out(b64::decoded_size(text.size()), '\0');
  auto [written, read] = b64::decode(out.data(), text.data(), body);
  if (read != body) throw FormatError("malformed base64 block");
  out.resize(written);
  return out;
}

}  // namespace codeconcept
