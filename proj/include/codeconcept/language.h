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

#ifndef CODECONCEPT_LANGUAGE_H_
#define CODECONCEPT_LANGUAGE_H_

#include <optional>
#include <string>
#include <string_view>

namespace codeconcept {

// Languages with a linked grammar.
enum class Language { kJava, kC };

std::string_view LanguageName(Language language);

// Case-insensitive lookup by name ("java", "c").
std::optional<Language> LanguageFromName(std::string_view name);

// Lookup by file extension including the dot (".java", ".c", ".h").
std::optional<Language> LanguageFromExtension(std::string_view extension);

}  // namespace codeconcept

#endif  // CODECONCEPT_LANGUAGE_H_
