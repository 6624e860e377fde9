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

#include "codeconcept/language.h"

#include <algorithm>
#include <cctype>
#include <string>

namespace codeconcept {

std::string_view LanguageName(Language language) {
  switch (language) {
    case Language::kJava:
      return "Java";
    case Language::kC:
      return "C";
  }
  return "unknown";
}

std::optional<Language> LanguageFromName(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "java") return Language::kJava;
  if (lower == "c") return Language::kC;
  return std::nullopt;
}

std::optional<Language> LanguageFromExtension(std::string_view extension) {
  if (extension == ".java") return Language::kJava;
  if (extension == ".c" || extension == ".h") return Language::kC;
  return std::nullopt;
}

}  // namespace codeconcept
