#pragma once

// The three views of a snippet: original, delexicalized and mixed-content
// augmented, each behind the same structural prefix line.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mvd/lexer.hpp"
#include "mvd/rng.hpp"
#include "mvd/types.hpp"

namespace mvd {

enum class Domain { Clean, Mixed, Fragment };

inline std::string_view domain_name(Domain d) {
  switch (d) {
    case Domain::Clean: return "clean";
    case Domain::Mixed: return "mixed";
    case Domain::Fragment: return "fragment";
  }
  return "clean";
}

struct DomainPrefix {
  Domain domain = Domain::Fragment;
  std::size_t loops = 0;
  std::size_t functions = 0;
  std::size_t classes = 0;

  // <dom=clean;loops=L;fns=F;cls=C>
  std::string serialize() const {
    return "<dom=" + std::string(domain_name(domain)) + ";loops=" + std::to_string(loops) +
           ";fns=" + std::to_string(functions) + ";cls=" + std::to_string(classes) + ">";
  }

  friend bool operator==(const DomainPrefix&, const DomainPrefix&) = default;
};

inline constexpr double kMixedRatioThreshold = 0.3;
inline constexpr std::size_t kFragmentMaxLines = 5;

inline std::vector<std::string_view> split_lines(std::string_view code) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= code.size()) {
    std::size_t nl = code.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(code.substr(start));
      break;
    }
    lines.push_back(code.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

inline DomainPrefix domain_prefix(std::string_view code, const LanguageProfile& profile) {
  std::size_t syntactic = 0, prose = 0;
  for (auto line : split_lines(code)) {
    switch (classify_line(line, profile)) {
      case LineClass::Syntactic: ++syntactic; break;
      case LineClass::NaturalLanguage: ++prose; break;
      case LineClass::Blank: break;
    }
  }
  const auto features = structural_features(lex(code, profile), profile);
  const std::size_t non_blank = syntactic + prose;
  const double ratio = non_blank == 0 ? 0.0 : static_cast<double>(prose) / static_cast<double>(non_blank);

  DomainPrefix p;
  p.loops = features.loops;
  p.functions = features.functions;
  p.classes = features.classes;
  if (ratio >= kMixedRatioThreshold)
    p.domain = Domain::Mixed;
  else if (features.functions + features.classes == 0 && non_blank < kFragmentMaxLines)
    p.domain = Domain::Fragment;
  else
    p.domain = Domain::Clean;
  return p;
}

inline constexpr std::string_view kIdPlaceholder = "ID";
inline constexpr std::string_view kStrPlaceholder = "STR";
inline constexpr std::string_view kNumPlaceholder = "NUM";

inline bool is_placeholder(std::string_view s) {
  return s == kIdPlaceholder || s == kStrPlaceholder || s == kNumPlaceholder;
}

// Identifiers, literals, comments and stray bytes collapse to ID/STR/NUM;
// keywords, punctuation and line breaks survive. Tokens on a line are
// separated by one space.
inline std::string delexicalize(const std::vector<LexToken>& tokens) {
  std::string out;
  bool line_start = true;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Newline) {
      out += '\n';
      line_start = true;
      continue;
    }
    std::string_view piece;
    switch (t.kind) {
      case TokenKind::Identifier: piece = is_placeholder(t.text) ? t.text : kIdPlaceholder; break;
      case TokenKind::StringLit:
      case TokenKind::Comment:
      case TokenKind::Text: piece = kStrPlaceholder; break;
      case TokenKind::NumberLit: piece = kNumPlaceholder; break;
      case TokenKind::Keyword:
      case TokenKind::Punct: piece = t.text; break;
      case TokenKind::Newline: break;
    }
    if (!line_start) out += ' ';
    out += piece;
    line_start = false;
  }
  return out;
}

// Prose lines injected into training snippets. No quotes, brackets or
// operator characters, so every one classifies as natural language.
inline const std::array<std::string_view, 24>& fragment_pool() {
  static const std::array<std::string_view, 24> pool = {
      "This section handles the main processing logic.",
      "Note that the values below are computed once and reused.",
      "The following helper keeps track of intermediate results.",
      "Make sure the input has been validated before calling this.",
      "Here we update the running state for the next iteration.",
      "Remember to check the edge cases described in the task.",
      "The result is returned to the caller without modification.",
      "Please refer to the documentation for more details.",
      "This approach works well for small and medium inputs.",
      "We first prepare the data and then run the main step.",
      "The code below was adapted from an earlier version.",
      "Each element is visited exactly once in this pass.",
      "Performance could be improved with a better data structure.",
      "The output format follows the usual conventions.",
      "Some of these variables are only used for debugging.",
      "Read the whole input before starting the computation.",
      "Keep in mind that the order of operations matters here.",
      "An alternative solution would use recursion instead.",
      "Example usage is shown in the tests at the bottom.",
      "The answer should be printed on a single line.",
      "Large values are handled by the same logic as small ones.",
      "Thanks to the previous step the list is already sorted.",
      "Both branches produce the same kind of value.",
      "Everything after this point is cleanup and reporting.",
  };
  return pool;
}

// With probability `probability`, inserts 1 to 3 pool sentences, each on its
// own line at a uniformly chosen line boundary. Empty code is returned as is.
inline std::string augment_mixed(std::string_view code, double probability, Rng& rng) {
  if (code.empty() || !bernoulli(rng, probability)) return std::string(code);
  std::vector<std::string> lines;
  for (auto l : split_lines(code)) lines.emplace_back(l);
  const std::size_t k = 1 + uniform_index(rng, 3);
  const auto& pool = fragment_pool();
  for (std::size_t n = 0; n < k; ++n) {
    auto sentence = pool[uniform_index(rng, pool.size())];
    auto at = uniform_index(rng, lines.size() + 1);
    lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(at), std::string(sentence));
  }
  std::string out;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (n) out += '\n';
    out += lines[n];
  }
  return out;
}

inline std::vector<TokenId> token_dropout(const std::vector<TokenId>& ids, double rate, TokenId mask_id,
                                          const std::unordered_set<TokenId>& special_ids, Rng& rng) {
  std::vector<TokenId> out(ids);
  for (auto& id : out) {
    if (special_ids.contains(id)) continue;
    if (bernoulli(rng, rate)) id = mask_id;
  }
  return out;
}

enum class ViewMode { Train, Infer };

inline constexpr double kMixedAugmentProbability = 0.4;

struct ViewSet {
  DomainPrefix prefix;
  std::string original;
  std::string delex;
  std::string mixed;
};

namespace detail {
inline std::string with_prefix(const std::string& prefix, std::string_view body) {
  if (body.empty()) return prefix;
  std::string out;
  out.reserve(prefix.size() + 1 + body.size());
  out += prefix;
  out += '\n';
  out += body;
  return out;
}
}  // namespace detail

inline ViewSet make_views(std::string_view code, const LanguageProfile& profile, ViewMode mode, Rng& rng,
                          double augment_probability = kMixedAugmentProbability) {
  ViewSet v;
  v.prefix = domain_prefix(code, profile);
  const std::string head = v.prefix.serialize();
  v.original = detail::with_prefix(head, code);
  v.delex = detail::with_prefix(head, delexicalize(lex(code, profile)));
  if (mode == ViewMode::Train)
    v.mixed = detail::with_prefix(head, augment_mixed(code, augment_probability, rng));
  else
    v.mixed = v.original;
  return v;
}

}  // namespace mvd
