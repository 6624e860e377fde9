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

#include "codeconcept/corpus.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "codeconcept/errors.h"
#include "codeconcept/syntax_tree.h"

namespace codeconcept {
namespace {

namespace fs = std::filesystem;

class ScratchDir {
 public:
  ScratchDir() {
    const auto* info = testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("corpus_test_") + info->test_suite_name() + "_" +
             info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }

  const fs::path& path() const { return path_; }
  void Write(const std::string& name, const std::string& text) const {
    fs::create_directories((path_ / name).parent_path());
    std::ofstream(path_ / name, std::ios::binary) << text;
  }

 private:
  fs::path path_;
};

std::vector<std::string> Texts(const std::vector<TokenInstance>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

Snippet JavaSnippet(const std::string& source) {
  return {"t.java", Language::kJava, source};
}

TEST(LoadCorpus, TwoJavaFiles) {
  ScratchDir dir;
  dir.Write("b.java", "class B {}\n");
  dir.Write("a.java", "class A {}\n");
  const Corpus corpus = LoadCorpus(dir.path());
  ASSERT_EQ(corpus.snippets.size(), 2u);
  EXPECT_EQ(corpus.snippets[0].id, "a.java");
  EXPECT_EQ(corpus.snippets[1].id, "b.java");
  EXPECT_EQ(corpus.snippets[0].language, Language::kJava);
}

TEST(LoadCorpus, EmptyDirectoryIsAnError) {
  ScratchDir dir;
  try {
    LoadCorpus(dir.path());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty corpus"), std::string::npos);
  }
}

TEST(LoadCorpus, LanguageFilterKeepsOnlyJava) {
  ScratchDir dir;
  dir.Write("x/one.java", "class One {}\n");
  dir.Write("x/two.java", "class Two {}\n");
  dir.Write("y/three.c", "int main(void) { return 0; }\n");
  dir.Write("notes.txt", "not code\n");
  const Corpus all = LoadCorpus(dir.path());
  EXPECT_EQ(all.snippets.size(), 3u);
  const Corpus java = LoadCorpus(dir.path(), std::set<Language>{Language::kJava});
  ASSERT_EQ(java.snippets.size(), 2u);
  EXPECT_EQ(java.snippets[0].id, "x/one.java");
  EXPECT_EQ(java.snippets[1].id, "x/two.java");
}

TEST(LoadCorpus, InvalidUtf8IsSkippedWithWarning) {
  ScratchDir dir;
  dir.Write("good.java", "class G {}\n");
  dir.Write("bad.java", std::string("class B { String s = \"\xff\xfe\"; }\n"));
  const Corpus corpus = LoadCorpus(dir.path());
  ASSERT_EQ(corpus.snippets.size(), 1u);
  EXPECT_EQ(corpus.snippets[0].id, "good.java");
  EXPECT_FALSE(corpus.warnings.empty());
}

TEST(Tokenize, DeclarationWithByteSpans) {
  const auto tokens = Tokenize(JavaSnippet("int x;"));
  ASSERT_EQ(Texts(tokens), (std::vector<std::string>{"int", "x", ";"}));
  EXPECT_EQ(tokens[0].start_byte, 0u);
  EXPECT_EQ(tokens[0].end_byte, 3u);
  EXPECT_EQ(tokens[1].start_byte, 4u);
  EXPECT_EQ(tokens[1].end_byte, 5u);
  EXPECT_EQ(tokens[2].start_byte, 5u);
  EXPECT_EQ(tokens[2].end_byte, 6u);
  for (size_t i = 0; i < tokens.size(); ++i) {
    EXPECT_EQ(tokens[i].token_idx, static_cast<int32_t>(i));
  }
}

TEST(Tokenize, EmptyClassBody) {
  EXPECT_EQ(Texts(Tokenize(JavaSnippet("class A{}"))),
            (std::vector<std::string>{"class", "A", "{", "}"}));
}

TEST(Tokenize, StringLiteralsAndCommentsAreSingleTokens) {
  const auto tokens = Tokenize(
      JavaSnippet("class A { // note\n String s = \"a b\"; char c = 'x'; }"));
  const auto texts = Texts(tokens);
  EXPECT_NE(std::find(texts.begin(), texts.end(), "// note"), texts.end());
  EXPECT_NE(std::find(texts.begin(), texts.end(), "\"a b\""), texts.end());
  EXPECT_NE(std::find(texts.begin(), texts.end(), "'x'"), texts.end());
}

TEST(Tokenize, BrokenInputRaisesSyntaxError) {
  EXPECT_THROW(Tokenize(JavaSnippet("class A { int x = ; ")), SyntaxError);
}

TEST(Tokenize, RoundTripOnDemoCorpus) {
  const Corpus corpus =
      LoadCorpus(std::string(CODECONCEPT_SOURCE_DIR) + "/data/demo_corpus");
  ASSERT_EQ(corpus.snippets.size(), 60u);
  for (const Snippet& s : corpus.snippets) {
    const auto tokens = Tokenize(s);
    for (const auto& t : tokens) {
      ASSERT_EQ(s.source.substr(t.start_byte, t.end_byte - t.start_byte), t.text);
      for (char c : t.text.substr(0, 1)) EXPECT_FALSE(std::isspace(c)) << s.id;
    }
    // Gaps between tokens hold only whitespace.
    uint32_t cursor = 0;
    for (const auto& t : tokens) {
      for (uint32_t i = cursor; i < t.start_byte; ++i) {
        ASSERT_TRUE(std::isspace(static_cast<unsigned char>(s.source[i])))
            << s.id << " byte " << i;
      }
      cursor = t.end_byte;
    }
    EXPECT_EQ(Reconstruct(s.source, tokens), s.source) << s.id;
  }
}

TEST(SyntacticTags, IdentifierAndPunctuation) {
  const auto tagged = TokenizeTagged(JavaSnippet("int x;"));
  ASSERT_EQ(tagged.size(), 3u);
  EXPECT_EQ(tagged[0].tag, "integral_type");
  EXPECT_EQ(tagged[1].tag, "identifier");
  // ';' is anonymous: it takes the kind of its deepest named ancestor.
  EXPECT_EQ(tagged[2].tag, "local_variable_declaration");
}

TEST(SyntacticTags, VocabularyIsUnionAcrossLanguages) {
  ScratchDir dir;
  dir.Write("a.java", "class A { int f() { return 1; } }\n");
  dir.Write("b.c", "int g(void) { return 2; }\n");
  const Corpus corpus = LoadCorpus(dir.path());
  const SyntacticLabeling labeling = SyntacticTags(corpus);
  for (const auto& kind : DeclaredTokenKinds(Language::kJava)) {
    EXPECT_TRUE(labeling.tag_vocabulary.contains(kind)) << kind;
  }
  for (const auto& kind : DeclaredTokenKinds(Language::kC)) {
    EXPECT_TRUE(labeling.tag_vocabulary.contains(kind)) << kind;
  }
  size_t tokens = 0;
  for (const auto& s : corpus.snippets) tokens += Tokenize(s).size();
  EXPECT_EQ(labeling.tags.size(), tokens);
  for (const auto& [id, tag] : labeling.tags) {
    EXPECT_TRUE(labeling.tag_vocabulary.contains(tag)) << tag;
  }
}

TEST(TokenizeCorpus, ThreadCountDoesNotChangeOutput) {
  const Corpus corpus =
      LoadCorpus(std::string(CODECONCEPT_SOURCE_DIR) + "/data/demo_corpus");
  const auto one = TokenizeCorpus(corpus, 1);
  const auto four = TokenizeCorpus(corpus, 4);
  EXPECT_EQ(one, four);
  std::ostringstream a;
  WriteTokensJsonl(a, one);
  std::istringstream in(a.str());
  const auto back = ReadTokensJsonl(in);
  size_t i = 0;
  for (const auto& snippet : one) {
    for (const auto& t : snippet) EXPECT_EQ(back.at(i++), t);
  }
  EXPECT_EQ(i, back.size());
}

}  // namespace
}  // namespace codeconcept
