#pragma once

// Multi-language maximal-munch lexer. It only needs to separate identifiers,
// keywords, literals, comments and punctuation; it never builds a tree and
// never rejects input.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvd/error.hpp"

namespace mvd {

enum class Language { Python, Cpp, Java, JavaScript, CSharp, Php, Go, C, Unknown };

inline constexpr std::array<Language, 8> kNamedLanguages = {
    Language::Python, Language::Cpp,  Language::Java, Language::JavaScript,
    Language::CSharp, Language::Php,  Language::Go,   Language::C};

inline std::string_view language_name(Language lang) {
  switch (lang) {
    case Language::Python: return "python";
    case Language::Cpp: return "cpp";
    case Language::Java: return "java";
    case Language::JavaScript: return "javascript";
    case Language::CSharp: return "csharp";
    case Language::Php: return "php";
    case Language::Go: return "go";
    case Language::C: return "c";
    case Language::Unknown: return "unknown";
  }
  return "unknown";
}

// Case-insensitive; anything unrecognised is Unknown.
inline Language parse_language(std::string_view name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "python" || s == "py") return Language::Python;
  if (s == "cpp" || s == "c++" || s == "cxx") return Language::Cpp;
  if (s == "java") return Language::Java;
  if (s == "javascript" || s == "js" || s == "typescript" || s == "ts") return Language::JavaScript;
  if (s == "csharp" || s == "c#" || s == "cs") return Language::CSharp;
  if (s == "php") return Language::Php;
  if (s == "go" || s == "golang") return Language::Go;
  if (s == "c") return Language::C;
  return Language::Unknown;
}

enum class TokenKind { Identifier, Keyword, StringLit, NumberLit, Comment, Punct, Newline, Text };

inline std::string_view kind_name(TokenKind k) {
  switch (k) {
    case TokenKind::Identifier: return "Identifier";
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::StringLit: return "StringLit";
    case TokenKind::NumberLit: return "NumberLit";
    case TokenKind::Comment: return "Comment";
    case TokenKind::Punct: return "Punct";
    case TokenKind::Newline: return "Newline";
    case TokenKind::Text: return "Text";
  }
  return "?";
}

// `text` views into the lexed source; tokens must not outlive it.
struct LexToken {
  TokenKind kind;
  std::string_view text;
  std::size_t offset;
  std::size_t line;  // 1-based, line of the first byte
};

struct StringDelim {
  std::string open;
  std::string close;
  char escape = '\\';          // '\0' disables escapes
  bool multiline = true;       // false: an unterminated literal stops at end of line
  bool doubled_quote = false;  // `""` inside the literal is an escaped quote (C# verbatim)
};

struct LanguageProfile {
  Language name = Language::Unknown;
  std::set<std::string, std::less<>> keywords;
  std::vector<std::string> line_comments;
  std::vector<std::pair<std::string, std::string>> block_comments;
  std::vector<StringDelim> string_delims;  // longest opener first
  // Letters that may prefix a quote without becoming an identifier (r"", b'', f"").
  std::string string_prefix_letters;
  std::size_t max_string_prefix = 0;
  bool cpp_raw_strings = false;  // R"tag(...)tag"
  bool quote_digit_separator = false;  // 1'000'000
  bool floor_div_operator = false;     // `//` is an operator, not a comment
};

namespace detail {

inline const std::vector<std::string>& keyword_list(Language lang) {
  static const std::vector<std::string> python = {
      "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
      "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
      "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise",
      "return", "try", "while", "with", "yield"};
  static const std::vector<std::string> c = {
      "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
      "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
      "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch",
      "typedef", "union", "unsigned", "void", "volatile", "while", "_Bool", "NULL"};
  static const std::vector<std::string> cpp = {
      "alignas", "alignof", "and", "auto", "bool", "break", "case", "catch", "char",
      "class", "const", "constexpr", "const_cast", "continue", "decltype", "default",
      "delete", "do", "double", "dynamic_cast", "else", "enum", "explicit", "export",
      "extern", "false", "float", "for", "friend", "goto", "if", "inline", "int", "long",
      "mutable", "namespace", "new", "noexcept", "not", "nullptr", "operator", "or",
      "private", "protected", "public", "register", "reinterpret_cast", "return", "short",
      "signed", "sizeof", "static", "static_assert", "static_cast", "struct", "switch",
      "template", "this", "throw", "true", "try", "typedef", "typeid", "typename", "union",
      "unsigned", "using", "virtual", "void", "volatile", "while", "override", "final"};
  static const std::vector<std::string> java = {
      "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class",
      "const", "continue", "default", "do", "double", "else", "enum", "extends", "final",
      "finally", "float", "for", "goto", "if", "implements", "import", "instanceof", "int",
      "interface", "long", "native", "new", "package", "private", "protected", "public",
      "return", "short", "static", "strictfp", "super", "switch", "synchronized", "this",
      "throw", "throws", "transient", "try", "void", "volatile", "while", "true", "false",
      "null", "var", "record"};
  static const std::vector<std::string> javascript = {
      "async", "await", "break", "case", "catch", "class", "const", "continue", "debugger",
      "default", "delete", "do", "else", "export", "extends", "false", "finally", "for",
      "function", "if", "import", "in", "instanceof", "let", "new", "null", "of", "return",
      "super", "switch", "this", "throw", "true", "try", "typeof", "undefined", "var",
      "void", "while", "with", "yield"};
  static const std::vector<std::string> csharp = {
      "abstract", "as", "base", "bool", "break", "byte", "case", "catch", "char", "checked",
      "class", "const", "continue", "decimal", "default", "delegate", "do", "double", "else",
      "enum", "event", "explicit", "extern", "false", "finally", "fixed", "float", "for",
      "foreach", "goto", "if", "implicit", "in", "int", "interface", "internal", "is", "lock",
      "long", "namespace", "new", "null", "object", "operator", "out", "override", "params",
      "private", "protected", "public", "readonly", "ref", "return", "sbyte", "sealed",
      "short", "sizeof", "static", "string", "struct", "switch", "this", "throw", "true",
      "try", "typeof", "uint", "ulong", "unchecked", "unsafe", "ushort", "using", "var",
      "virtual", "void", "volatile", "while", "async", "await"};
  static const std::vector<std::string> php = {
      "abstract", "and", "array", "as", "break", "callable", "case", "catch", "class",
      "clone", "const", "continue", "declare", "default", "do", "echo", "else", "elseif",
      "empty", "enddeclare", "endfor", "endforeach", "endif", "endswitch", "endwhile",
      "extends", "final", "finally", "fn", "for", "foreach", "function", "global", "if",
      "implements", "include", "instanceof", "interface", "isset", "list", "match",
      "namespace", "new", "or", "print", "private", "protected", "public", "require",
      "return", "static", "switch", "throw", "trait", "try", "unset", "use", "var", "while",
      "yield", "true", "false", "null"};
  static const std::vector<std::string> go = {
      "break", "case", "chan", "const", "continue", "default", "defer", "else",
      "fallthrough", "for", "func", "go", "goto", "if", "import", "interface", "map",
      "package", "range", "return", "select", "struct", "switch", "type", "var", "nil",
      "true", "false"};
  static const std::vector<std::string> none;
  switch (lang) {
    case Language::Python: return python;
    case Language::Cpp: return cpp;
    case Language::Java: return java;
    case Language::JavaScript: return javascript;
    case Language::CSharp: return csharp;
    case Language::Php: return php;
    case Language::Go: return go;
    case Language::C: return c;
    case Language::Unknown: return none;
  }
  return none;
}

inline StringDelim quoted(std::string q, bool multiline = false) {
  return StringDelim{q, q, '\\', multiline, false};
}

inline void sort_delims(std::vector<StringDelim>& delims) {
  std::stable_sort(delims.begin(), delims.end(), [](const StringDelim& a, const StringDelim& b) {
    return a.open.size() > b.open.size();
  });
}

inline LanguageProfile build_profile(Language lang) {
  LanguageProfile p;
  p.name = lang;
  for (const auto& kw : keyword_list(lang)) p.keywords.insert(kw);
  const std::vector<std::string> slash_line = {"//"};
  const std::vector<std::pair<std::string, std::string>> slash_block = {{"/*", "*/"}};
  switch (lang) {
    case Language::Python:
      p.line_comments = {"#"};
      p.string_delims = {quoted("\"\"\"", true), quoted("'''", true), quoted("\""), quoted("'")};
      p.string_prefix_letters = "rRbBuUfF";
      p.max_string_prefix = 2;
      p.floor_div_operator = true;
      break;
    case Language::Cpp:
      p.line_comments = slash_line;
      p.block_comments = slash_block;
      p.string_delims = {quoted("\""), quoted("'")};
      p.string_prefix_letters = "uUL8";
      p.max_string_prefix = 2;
      p.cpp_raw_strings = true;
      p.quote_digit_separator = true;
      break;
    case Language::C:
      p.line_comments = slash_line;
      p.block_comments = slash_block;
      p.string_delims = {quoted("\""), quoted("'")};
      p.string_prefix_letters = "uUL8";
      p.max_string_prefix = 2;
      break;
    case Language::Java:
      p.line_comments = slash_line;
      p.block_comments = slash_block;
      p.string_delims = {quoted("\"\"\"", true), quoted("\""), quoted("'")};
      break;
    case Language::JavaScript:
      p.line_comments = slash_line;
      p.block_comments = slash_block;
      p.string_delims = {quoted("`", true), quoted("\""), quoted("'")};
      break;
    case Language::CSharp:
      p.line_comments = slash_line;
      p.block_comments = slash_block;
      p.string_delims = {
          StringDelim{"$@\"", "\"", '\0', true, true}, StringDelim{"@$\"", "\"", '\0', true, true},
          StringDelim{"\"\"\"", "\"\"\"", '\0', true, false},
          StringDelim{"@\"", "\"", '\0', true, true}, quoted("$\""), quoted("\""), quoted("'")};
      break;
    case Language::Php:
      p.line_comments = {"//", "#"};
      p.block_comments = slash_block;
      p.string_delims = {quoted("\"", true), quoted("'", true)};
      break;
    case Language::Go:
      p.line_comments = slash_line;
      p.block_comments = slash_block;
      p.string_delims = {StringDelim{"`", "`", '\0', true, false}, quoted("\""), quoted("'")};
      break;
    case Language::Unknown:
      for (Language named : kNamedLanguages)
        for (const auto& kw : keyword_list(named)) p.keywords.insert(kw);
      p.line_comments = {"//", "#"};
      p.block_comments = slash_block;
      p.string_delims = {quoted("\"\"\"", true), quoted("'''", true), quoted("`", true),
                         quoted("\""), quoted("'")};
      p.string_prefix_letters = "rRbBuUfF";
      p.max_string_prefix = 2;
      break;
  }
  sort_delims(p.string_delims);
  std::stable_sort(p.line_comments.begin(), p.line_comments.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  return p;
}

inline bool starts_with(std::string_view s, std::size_t pos, std::string_view prefix) {
  return s.size() - pos >= prefix.size() && s.compare(pos, prefix.size(), prefix) == 0;
}

inline bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
inline bool is_ident_char(unsigned char c) { return is_ident_start(c) || std::isdigit(c); }
inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}
inline bool is_text_byte(unsigned char c) {
  return (c < 0x20 && c != '\n' && !is_space(c)) || c == 0x7f;
}

// Longest operators first; anything else printable is a single-byte Punct.
inline constexpr std::array<std::string_view, 48> kOperators = {
    ">>>=", "<<=", ">>=", "...", "===", "!==", "**=", "//=", "->*", "<=>", ">>>", "?\?=", "&&=",
    "||=",  "==",  "!=",  "<=",  ">=",  "&&",  "||",  "++",  "--",  "+=",  "-=",  "*=",  "/=",
    "%=",   "&=",  "|=",  "^=",  "<<",  ">>",  "->",  "=>",  "::",  "**",  "//",  "??",  "?.",
    ":=",   "..",  "@=",  "<-",  "##",  ".*",  "|>",  "!!",  "&^"};

inline std::size_t match_string_body(std::string_view code, std::size_t pos, const StringDelim& d) {
  // pos is just past the opener; returns end offset (exclusive).
  std::size_t i = pos;
  while (i < code.size()) {
    if (d.escape != '\0' && code[i] == d.escape) {
      i += 2;
      continue;
    }
    if (starts_with(code, i, d.close)) {
      if (d.doubled_quote && starts_with(code, i + d.close.size(), d.close)) {
        i += 2 * d.close.size();
        continue;
      }
      return i + d.close.size();
    }
    if (!d.multiline && code[i] == '\n') return i;
    ++i;
  }
  return code.size();
}

inline std::size_t match_number(std::string_view code, std::size_t pos,
                                const LanguageProfile& profile) {
  auto at = [&](std::size_t i) -> unsigned char { return i < code.size() ? code[i] : 0; };
  std::size_t i = pos;
  auto digits = [&](auto pred) {
    while (i < code.size()) {
      unsigned char c = at(i);
      if (pred(c) || (c == '_' && pred(at(i + 1)))) {
        ++i;
      } else if (profile.quote_digit_separator && c == '\'' && pred(at(i + 1)) && i > pos) {
        ++i;
      } else {
        break;
      }
    }
  };
  auto is_dec = [](unsigned char c) { return std::isdigit(c) != 0; };
  if (at(i) == '0' && (at(i + 1) == 'x' || at(i + 1) == 'X') && std::isxdigit(at(i + 2))) {
    i += 2;
    digits([](unsigned char c) { return std::isxdigit(c) != 0; });
  } else if (at(i) == '0' && (at(i + 1) == 'b' || at(i + 1) == 'B') &&
             (at(i + 2) == '0' || at(i + 2) == '1')) {
    i += 2;
    digits([](unsigned char c) { return c == '0' || c == '1'; });
  } else if (at(i) == '0' && (at(i + 1) == 'o' || at(i + 1) == 'O') && at(i + 2) >= '0' &&
             at(i + 2) <= '7') {
    i += 2;
    digits([](unsigned char c) { return c >= '0' && c <= '7'; });
  } else {
    digits(is_dec);
    if (at(i) == '.' && is_dec(at(i + 1))) {
      ++i;
      digits(is_dec);
    }
    if ((at(i) == 'e' || at(i) == 'E') &&
        (is_dec(at(i + 1)) || ((at(i + 1) == '+' || at(i + 1) == '-') && is_dec(at(i + 2))))) {
      i += (is_dec(at(i + 1)) ? 1 : 2);
      digits(is_dec);
    }
  }
  // Type suffixes (10UL, 1.5f, 3j, 10n) only when the whole run is suffix
  // letters; `1abc` stays a number followed by an identifier.
  static constexpr std::string_view suffixes = "uUlLfFdDjJnmM";
  std::size_t s = i;
  while (s < code.size() && suffixes.find(static_cast<char>(at(s))) != std::string_view::npos) ++s;
  if (s - i <= 3 && !is_ident_char(at(s))) i = s;
  return i;
}

// Returns end of a C++ raw string starting at pos (pointing at the R), or 0.
inline std::size_t match_cpp_raw(std::string_view code, std::size_t pos) {
  if (!starts_with(code, pos, "R\"")) return 0;
  std::size_t open = pos + 2;
  std::size_t paren = open;
  while (paren < code.size() && paren - open <= 16 && code[paren] != '(' && code[paren] != ' ' &&
         code[paren] != '\n' && code[paren] != ')' && code[paren] != '\\' && code[paren] != '"')
    ++paren;
  if (paren >= code.size() || code[paren] != '(') return 0;
  std::string close = ")" + std::string(code.substr(open, paren - open)) + "\"";
  std::size_t end = code.find(close, paren + 1);
  return end == std::string_view::npos ? code.size() : end + close.size();
}

}  // namespace detail

// Shared, immutable profile for a language.
inline const LanguageProfile& profile_for(Language lang) {
  static const std::array<LanguageProfile, 9> profiles = [] {
    std::array<LanguageProfile, 9> all;
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = detail::build_profile(static_cast<Language>(i));
    return all;
  }();
  return profiles[static_cast<std::size_t>(lang)];
}

// One keyword per line; blank lines and lines starting with '#' are ignored.
inline std::set<std::string, std::less<>> load_keyword_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open keyword file " + path);
  std::set<std::string, std::less<>> keywords;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    keywords.insert(line.substr(b, e - b + 1));
  }
  if (keywords.empty()) throw Error(ErrorCode::BadConfig, "keyword file " + path + " is empty");
  return keywords;
}

inline LanguageProfile with_keywords(LanguageProfile profile,
                                     std::set<std::string, std::less<>> keywords) {
  profile.keywords = std::move(keywords);
  return profile;
}

inline std::vector<LexToken> lex(std::string_view code, const LanguageProfile& profile) {
  using detail::starts_with;
  std::vector<LexToken> out;
  std::size_t i = 0;
  std::size_t line = 1;
  auto emit = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    out.push_back(LexToken{kind, code.substr(begin, end - begin), begin, line});
    for (std::size_t k = begin; k < end; ++k)
      if (code[k] == '\n') ++line;
  };
  auto try_string = [&](std::size_t start, std::size_t quote_pos) -> bool {
    for (const auto& d : profile.string_delims) {
      if (starts_with(code, quote_pos, d.open)) {
        emit(TokenKind::StringLit, start, detail::match_string_body(code, quote_pos + d.open.size(), d));
        return true;
      }
    }
    return false;
  };

  while (i < code.size()) {
    const auto c = static_cast<unsigned char>(code[i]);
    if (c == '\n') {
      emit(TokenKind::Newline, i, i + 1);
      ++i;
      continue;
    }
    if (detail::is_space(c)) {
      ++i;
      continue;
    }

    bool matched = false;
    for (const auto& marker : profile.line_comments) {
      if (marker == "//" && profile.floor_div_operator) continue;
      if (starts_with(code, i, marker)) {
        std::size_t end = code.find('\n', i);
        if (end == std::string_view::npos) end = code.size();
        emit(TokenKind::Comment, i, end);
        i = end;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (const auto& [open, close] : profile.block_comments) {
      if (starts_with(code, i, open)) {
        std::size_t end = code.find(close, i + open.size());
        end = end == std::string_view::npos ? code.size() : end + close.size();
        emit(TokenKind::Comment, i, end);
        i = end;
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (detail::is_ident_start(c)) {
      // String prefixes (r"", u8"", LR"()") win over identifiers; longest first.
      std::size_t p = i;
      while (p < code.size() && p - i < profile.max_string_prefix &&
             profile.string_prefix_letters.find(code[p]) != std::string::npos)
        ++p;
      for (std::size_t q = p + 1; q-- > i;) {
        if (profile.cpp_raw_strings) {
          if (std::size_t end = detail::match_cpp_raw(code, q); end != 0) {
            emit(TokenKind::StringLit, i, end);
            i = end;
            matched = true;
            break;
          }
        }
        if (q > i && q < code.size() && (code[q] == '"' || code[q] == '\'') && try_string(i, q)) {
          i = out.back().offset + out.back().text.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }

    if (try_string(i, i)) {
      i = out.back().offset + out.back().text.size();
      continue;
    }

    if (std::isdigit(c) || (c == '.' && i + 1 < code.size() &&
                            std::isdigit(static_cast<unsigned char>(code[i + 1])))) {
      std::size_t end = detail::match_number(code, i, profile);
      if (end > i) {
        emit(TokenKind::NumberLit, i, end);
        i = end;
        continue;
      }
    }

    if (detail::is_ident_start(c)) {
      std::size_t end = i + 1;
      while (end < code.size() && detail::is_ident_char(static_cast<unsigned char>(code[end]))) ++end;
      auto word = code.substr(i, end - i);
      emit(profile.keywords.contains(word) ? TokenKind::Keyword : TokenKind::Identifier, i, end);
      i = end;
      continue;
    }

    if (detail::is_text_byte(c)) {
      std::size_t end = i + 1;
      while (end < code.size() && detail::is_text_byte(static_cast<unsigned char>(code[end]))) ++end;
      emit(TokenKind::Text, i, end);
      i = end;
      continue;
    }

    std::size_t len = 1;
    for (auto op : detail::kOperators) {
      if (op == "//" && !profile.floor_div_operator) continue;
      if (op == "//=" && !profile.floor_div_operator) continue;
      if (starts_with(code, i, op)) {
        len = op.size();
        break;
      }
    }
    emit(TokenKind::Punct, i, i + len);
    i += len;
  }
  return out;
}

enum class LineClass { Syntactic, NaturalLanguage, Blank };

namespace detail {

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (is_space(static_cast<unsigned char>(s[b])) || s[b] == '\n')) ++b;
  while (e > b && (is_space(static_cast<unsigned char>(s[e - 1])) || s[e - 1] == '\n')) --e;
  return s.substr(b, e - b);
}

inline std::string_view strip_comment_markers(std::string_view s, const LanguageProfile& profile) {
  s = trim(s);
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    for (const auto& m : profile.line_comments) {
      if (s.starts_with(m)) {
        s = trim(s.substr(m.size()));
        changed = true;
      }
    }
    for (const auto& [open, close] : profile.block_comments) {
      if (s.starts_with(open)) {
        s = trim(s.substr(open.size()));
        changed = true;
      }
      if (s.ends_with(close)) {
        s = trim(s.substr(0, s.size() - close.size()));
        changed = true;
      }
    }
    // Continuation lines of block comments and doc comments.
    if (!profile.block_comments.empty() && s.starts_with("*")) {
      s = trim(s.substr(1));
      changed = true;
    }
  }
  return s;
}

}  // namespace detail

// A line is prose when, comment markers aside, it has at least three
// alphabetic words, none of `; { } ( ) = < >`, and does not open with a keyword.
inline LineClass classify_line(std::string_view line, const LanguageProfile& profile) {
  if (detail::trim(line).empty()) return LineClass::Blank;
  std::string_view body = detail::strip_comment_markers(line, profile);
  if (body.find_first_of(";{}()=<>") != std::string_view::npos) return LineClass::Syntactic;

  std::size_t words = 0;
  std::string_view first_word;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && detail::is_space(static_cast<unsigned char>(body[i]))) ++i;
    std::size_t b = i;
    while (i < body.size() && !detail::is_space(static_cast<unsigned char>(body[i]))) ++i;
    auto chunk = body.substr(b, i - b);
    if (chunk.empty()) continue;
    static constexpr std::string_view edge = ".,:;!?\"'";
    while (!chunk.empty() && edge.find(chunk.front()) != std::string_view::npos) chunk.remove_prefix(1);
    while (!chunk.empty() && edge.find(chunk.back()) != std::string_view::npos) chunk.remove_suffix(1);
    if (first_word.empty() && b == 0) first_word = chunk;
    bool alpha = !chunk.empty() && std::all_of(chunk.begin(), chunk.end(), [](char ch) {
      return std::isalpha(static_cast<unsigned char>(ch)) || ch == '-' || ch == '\'';
    });
    if (alpha) ++words;
  }
  if (words < 3) return LineClass::Syntactic;
  if (!first_word.empty() && profile.keywords.contains(first_word)) return LineClass::Syntactic;
  return LineClass::NaturalLanguage;
}

struct StructuralFeatures {
  std::size_t loops = 0;
  std::size_t functions = 0;
  std::size_t classes = 0;

  friend bool operator==(const StructuralFeatures&, const StructuralFeatures&) = default;
};

inline StructuralFeatures structural_features(const std::vector<LexToken>& tokens,
                                              const LanguageProfile& profile) {
  static const std::set<std::string, std::less<>> loop_kw = {"for", "while", "do", "foreach"};
  static const std::set<std::string, std::less<>> fn_kw = {"def", "function", "fn", "func"};
  static const std::set<std::string, std::less<>> class_kw = {"class", "struct", "interface"};
  const bool c_family = profile.name != Language::Python;

  StructuralFeatures f;
  std::vector<const LexToken*> sig;  // tokens that matter for the C-family pattern
  for (const auto& t : tokens)
    if (t.kind != TokenKind::Newline && t.kind != TokenKind::Comment) sig.push_back(&t);

  long depth = 0;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const LexToken& t = *sig[k];
    if (t.kind == TokenKind::Keyword) {
      if (loop_kw.contains(t.text)) ++f.loops;
      if (fn_kw.contains(t.text)) ++f.functions;
      if (class_kw.contains(t.text)) ++f.classes;
    }
    if (t.kind == TokenKind::Punct) {
      if (t.text == "{") ++depth;
      if (t.text == "}" && depth > 0) --depth;
    }
    if (!c_family || depth != 0 || t.kind != TokenKind::Identifier) continue;
    if (k + 1 >= sig.size() || sig[k + 1]->text != "(") continue;
    if (k > 0 && sig[k - 1]->kind == TokenKind::Keyword && fn_kw.contains(sig[k - 1]->text)) continue;
    // Match the parameter list, then allow qualifiers (const, throws X) before `{`.
    std::size_t j = k + 1;
    long parens = 0;
    for (; j < sig.size(); ++j) {
      if (sig[j]->text == "(") ++parens;
      if (sig[j]->text == ")" && --parens == 0) break;
    }
    if (j >= sig.size()) continue;
    ++j;
    while (j < sig.size() && (sig[j]->kind == TokenKind::Keyword || sig[j]->kind == TokenKind::Identifier ||
                              sig[j]->text == ","))
      ++j;
    if (j < sig.size() && sig[j]->text == "{") ++f.functions;
  }
  return f;
}

}  // namespace mvd
