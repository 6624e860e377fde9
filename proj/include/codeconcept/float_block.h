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

#ifndef CODECONCEPT_FLOAT_BLOCK_H_
#define CODECONCEPT_FLOAT_BLOCK_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace codeconcept {

// Little-endian IEEE-754 binary32 bytes of `values`.
std::string PackFloat32(std::span<const double> values);
std::string PackFloat32(std::span<const float> values);
std::vector<float> UnpackFloat32(std::string_view bytes);

std::string Base64Encode(std::string_view bytes);
// Throws FormatError on malformed input.
std::string Base64Decode(std::string_view text);

}  // namespace codeconcept

#endif  // CODECONCEPT_FLOAT_BLOCK_H_
