#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace mvd;

namespace {

struct Tok {
  TokenKind kind;
  std::string text;
  friend bool operator==(const Tok&, const Tok&) = default;
  friend std::ostream& operator<<(std::ostream& o, const Tok& t) { return o << kind_name(t.kind) << ":" << t.text; }
};

std::vector<Tok> toks(std::string_view code, Language lang) {
  std::vector<Tok> out;
  for (const auto& t : lex(code, profile_for(lang))) out.push_back({t.kind, std::string(t.text)});
  return out;
}

using K = TokenKind;

}  // namespace

TEST(Lexer, AssignmentPython) {
  EXPECT_EQ(toks("x = 1", Language::Python),
            (std::vector<Tok>{{K::Identifier, "x"}, {K::Punct, "="}, {K::NumberLit, "1"}}));
}

TEST(Lexer, EmptyInput) { EXPECT_TRUE(lex("", profile_for(Language::Python)).empty()); }

TEST(Lexer, SliceWithFloorDivision) {
  EXPECT_EQ(toks("return sorted(arr)[:n//2]", Language::Python),
            (std::vector<Tok>{{K::Keyword, "return"},
                              {K::Identifier, "sorted"},
                              {K::Punct, "("},
                              {K::Identifier, "arr"},
                              {K::Punct, ")"},
                              {K::Punct, "["},
                              {K::Punct, ":"},
                              {K::Identifier, "n"},
                              {K::Punct, "//"},
                              {K::NumberLit, "2"},
                              {K::Punct, "]"}}));
}

TEST(Lexer, DoubleSlashIsCommentInCpp) {
  auto t = toks("a // rest of line\nb", Language::Cpp);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[1], (Tok{K::Comment, "// rest of line"}));
  EXPECT_EQ(t[2].kind, K::Newline);
}

TEST(Lexer, LineNumbersAreOneBased) {
  const auto t = lex("a\nb\n\nc", profile_for(Language::Python));
  ASSERT_EQ(t.back().text, "c");
  EXPECT_EQ(t.front().line, 1u);
  EXPECT_EQ(t.back().line, 4u);
}

TEST(Lexer, NumberForms) {
  for (std::string_view n : {"0x1F", "0b1011", "1_000_000", "3.14", "1e-9", "2.5E+3", ".5", "10L", "7u", "0o17"}) {
    const auto t = toks(n, Language::Unknown);
    ASSERT_EQ(t.size(), 1u) << n;
    EXPECT_EQ(t[0].kind, K::NumberLit) << n;
  }
  EXPECT_EQ(toks("1'000'000", Language::Cpp), (std::vector<Tok>{{K::NumberLit, "1'000'000"}}));
}

TEST(Lexer, StringForms) {
  EXPECT_EQ(toks(R"(s = "a\"b")", Language::Python)[2], (Tok{K::StringLit, R"("a\"b")"}));
  EXPECT_EQ(toks("\"\"\"multi\nline\"\"\"", Language::Python), (std::vector<Tok>{{K::StringLit, "\"\"\"multi\nline\"\"\""}}));
  EXPECT_EQ(toks(R"(r"C:\path")", Language::Python), (std::vector<Tok>{{K::StringLit, R"(r"C:\path")"}}));
  EXPECT_EQ(toks(R"(f"{x}")", Language::Python), (std::vector<Tok>{{K::StringLit, R"(f"{x}")"}}));
  EXPECT_EQ(toks("`a\n${b}`", Language::JavaScript), (std::vector<Tok>{{K::StringLit, "`a\n${b}`"}}));
  EXPECT_EQ(toks(R"cpp(R"x(a)" b)x")cpp", Language::Cpp), (std::vector<Tok>{{K::StringLit, R"cpp(R"x(a)" b)x")cpp"}}));
  EXPECT_EQ(toks(R"(@"a""b")", Language::CSharp), (std::vector<Tok>{{K::StringLit, R"(@"a""b")"}}));
}

TEST(Lexer, UnterminatedStringsNeverFail) {
  const auto t = toks("\"\"\"open forever\nmore", Language::Python);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].kind, K::StringLit);
  // A stray single-line quote stops at the end of its line.
  const auto u = toks("it's fine\nx = 1", Language::Unknown);
  EXPECT_EQ(u.back(), (Tok{K::NumberLit, "1"}));
}

TEST(Lexer, CommentsKeptAsTokens) {
  EXPECT_EQ(toks("# hello", Language::Python), (std::vector<Tok>{{K::Comment, "# hello"}}));
  EXPECT_EQ(toks("/* a\nb */ x", Language::Java),
            (std::vector<Tok>{{K::Comment, "/* a\nb */"}, {K::Identifier, "x"}}));
}

TEST(Lexer, ControlBytesBecomeText) {
  const auto t = toks(std::string("a\x01\x02 b"), Language::Python);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[1].kind, K::Text);
}

TEST(Lexer, KeywordsDependOnProfile) {
  EXPECT_EQ(toks("def", Language::Python)[0].kind, K::Keyword);
  EXPECT_EQ(toks("def", Language::Java)[0].kind, K::Identifier);
  EXPECT_EQ(toks("def", Language::Unknown)[0].kind, K::Keyword);
  EXPECT_EQ(toks("func", Language::Go)[0].kind, K::Keyword);
}

TEST(Lexer, EveryNamedLanguageHasKeywords) {
  for (auto lang : kNamedLanguages) EXPECT_FALSE(profile_for(lang).keywords.empty()) << language_name(lang);
  const auto& unknown = profile_for(Language::Unknown).keywords;
  for (auto lang : kNamedLanguages)
    for (const auto& kw : profile_for(lang).keywords) EXPECT_TRUE(unknown.contains(kw)) << kw;
}

TEST(Lexer, ParseLanguageNames) {
  EXPECT_EQ(parse_language("Python"), Language::Python);
  EXPECT_EQ(parse_language("C#"), Language::CSharp);
  EXPECT_EQ(parse_language("c++"), Language::Cpp);
  EXPECT_EQ(parse_language("Fortran"), Language::Unknown);
}

TEST(Lexer, KeywordFileOverride) {
  const auto path = std::filesystem::temp_directory_path() / "mvd_keywords.txt";
  {
    std::ofstream f(path);
    f << "banana\n\n  cherry \n";
  }
  const auto profile = with_keywords(profile_for(Language::Python), load_keyword_file(path.string()));
  const auto t = lex("banana def cherry", profile);
  EXPECT_EQ(t[0].kind, K::Keyword);
  EXPECT_EQ(t[1].kind, K::Identifier);
  EXPECT_EQ(t[2].kind, K::Keyword);
  std::filesystem::remove(path);
}

TEST(Lexer, ReconstructionFuzzSmall) {
  const auto r = oracle::lexer_fuzz(2000, 3);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(ClassifyLine, Examples) {
  const auto& py = profile_for(Language::Python);
  EXPECT_EQ(classify_line("   ", py), LineClass::Blank);
  EXPECT_EQ(classify_line("", py), LineClass::Blank);
  EXPECT_EQ(classify_line("for i in range(10):", py), LineClass::Syntactic);
  EXPECT_EQ(classify_line("This function calculates the running total", py), LineClass::NaturalLanguage);
  EXPECT_EQ(classify_line("# This function calculates the running total", py), LineClass::NaturalLanguage);
  EXPECT_EQ(classify_line("return the final answer now", py), LineClass::Syntactic);  // keyword first
  EXPECT_EQ(classify_line("two words", py), LineClass::Syntactic);
  EXPECT_EQ(classify_line("set the value = three", py), LineClass::Syntactic);
}

TEST(ClassifyLine, Deterministic) {
  const auto& p = profile_for(Language::Unknown);
  for (std::string_view l : {"a b c d", "x = 1", "// note this is prose"})
    EXPECT_EQ(classify_line(l, p), classify_line(l, p));
}

TEST(StructuralFeatures, Examples) {
  const auto& py = profile_for(Language::Python);
  auto f = structural_features(lex("def f():\n  pass", py), py);
  EXPECT_EQ(f.loops, 0u);
  EXPECT_EQ(f.functions, 1u);
  EXPECT_EQ(f.classes, 0u);

  f = structural_features({}, py);
  EXPECT_EQ(f.loops + f.functions + f.classes, 0u);

  f = structural_features(lex("class A:\n  def g(self):\n    for x in y: pass", py), py);
  EXPECT_EQ(f.loops, 1u);
  EXPECT_EQ(f.functions, 1u);
  EXPECT_EQ(f.classes, 1u);
}

TEST(StructuralFeatures, CFamilyDefinitions) {
  const auto& cpp = profile_for(Language::Cpp);
  const std::string code =
      "int add(int a, int b) {\n  return a + b;\n}\n"
      "int main() const noexcept {\n  while (x) { call(y); }\n}\n";
  const auto f = structural_features(lex(code, cpp), cpp);
  EXPECT_EQ(f.functions, 2u);  // calls inside bodies do not count
  EXPECT_EQ(f.loops, 1u);
  const auto& js = profile_for(Language::JavaScript);
  EXPECT_EQ(structural_features(lex("function f() { }", js), js).functions, 1u);
}
