#pragma once

// Templated synthetic corpus. Each class has a target style; a snippet's
// style is the human base moved `style_gap` of the way toward its class
// target, so style_gap = 0 makes every class draw from one distribution.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mvd/data.hpp"
#include "mvd/error.hpp"
#include "mvd/rng.hpp"

namespace mvd {

struct StyleKnobs {
  double comment_rate = 0.0;   // comment line before a statement
  double long_names = 0.0;     // descriptive multi-word identifiers
  double docstring = 0.0;      // function carries a doc comment
  double blank_rate = 0.0;     // blank line after a statement
  double camel_case = 0.0;     // camelCase instead of snake_case
  double fingerprint = 0.0;    // draw words and phrases from the class's favoured subset
};

inline StyleKnobs lerp(const StyleKnobs& a, const StyleKnobs& b, double t) {
  auto mix = [t](double x, double y) { return x + t * (y - x); };
  return {mix(a.comment_rate, b.comment_rate), mix(a.long_names, b.long_names), mix(a.docstring, b.docstring),
          mix(a.blank_rate, b.blank_rate), mix(a.camel_case, b.camel_case), mix(a.fingerprint, b.fingerprint)};
}

inline constexpr StyleKnobs kHumanStyle{0.08, 0.15, 0.05, 0.08, 0.2, 0.0};

// Class targets; index 0 is human. Task A uses entry 1 for "machine".
inline const std::array<StyleKnobs, 11>& style_targets() {
  static const std::array<StyleKnobs, 11> t = {{
      kHumanStyle,
      {0.70, 0.90, 0.90, 0.50, 0.10, 0.5},
      {0.50, 0.80, 0.30, 0.20, 0.90, 0.5},
      {0.90, 0.50, 0.60, 0.70, 0.50, 0.5},
      {0.30, 0.95, 0.80, 0.10, 0.70, 0.5},
      {0.80, 0.30, 0.20, 0.60, 0.10, 0.5},
      {0.20, 0.70, 0.95, 0.60, 0.30, 0.5},
      {0.60, 0.60, 0.10, 0.90, 0.80, 0.5},
      {0.95, 0.90, 0.50, 0.30, 0.40, 0.5},
      {0.10, 0.40, 0.70, 0.80, 0.95, 0.5},
      {0.40, 0.20, 0.90, 0.20, 0.60, 0.5},
  }};
  return t;
}

struct SynthConfig {
  Task task = Task::A;
  std::vector<std::size_t> per_class_counts;
  std::uint64_t seed = 0;
  double style_gap = 0.8;
  std::size_t min_statements = 4;
  std::size_t max_statements = 10;

  void validate() const {
    if (per_class_counts.size() != num_classes(task))
      throw Error(ErrorCode::BadConfig, "expected " + std::to_string(num_classes(task)) + " class counts, got " +
                                            std::to_string(per_class_counts.size()));
    for (auto c : per_class_counts)
      if (c == 0) throw Error(ErrorCode::BadConfig, "class counts must be > 0");
    if (!(style_gap >= 0.0 && style_gap <= 1.0)) throw Error(ErrorCode::BadConfig, "style_gap must be in [0, 1]");
    if (min_statements < 1 || min_statements > max_statements)
      throw Error(ErrorCode::BadConfig, "need 1 <= min_statements <= max_statements");
  }
};

// Task B class distribution divided by `divisor`.
inline std::vector<std::size_t> task_b_counts(std::size_t divisor) {
  if (divisor == 0) throw Error(ErrorCode::BadConfig, "divisor must be > 0");
  std::vector<std::size_t> out;
  for (auto c : kTaskBCounts) {
    if (c % divisor != 0 || c / divisor == 0)
      throw Error(ErrorCode::BadConfig, "class distribution is not divisible by " + std::to_string(divisor));
    out.push_back(c / divisor);
  }
  return out;
}

// "dist/100" or a comma-separated list such as "1000,1000".
inline std::vector<std::size_t> parse_counts(std::string_view spec) {
  if (spec.starts_with("dist/")) {
    try {
      return task_b_counts(std::stoul(std::string(spec.substr(5))));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::BadConfig, "bad counts spec '" + std::string(spec) + "'");
    }
  }
  std::vector<std::size_t> out;
  std::stringstream ss{std::string(spec)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoul(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::BadConfig, "bad counts spec '" + std::string(spec) + "'");
    }
  }
  return out;
}

namespace detail {

inline constexpr std::array<std::string_view, 28> kNameWords = {
    "total", "count", "result", "value", "index", "current", "max", "min", "sum", "item",
    "element", "number", "data", "buffer", "left", "right", "node", "score", "length", "output",
    "input", "temp", "prev", "next", "target", "window", "answer", "step"};

inline constexpr std::array<std::string_view, 18> kShortNames = {
    "a", "b", "c", "i", "j", "k", "n", "m", "x", "y", "s", "t", "tmp", "res", "cnt", "arr", "val", "p"};

inline constexpr std::array<std::string_view, 20> kCommentPhrases = {
    "Initialize the result variable", "Iterate over all elements", "Check the boundary condition",
    "Update the accumulator", "Return the final answer", "Compute the intermediate value",
    "Handle the special case", "Store the current value", "Move to the next position",
    "Keep track of the best score", "Skip values that are too small", "Add the current item to the total",
    "Calculate the running sum", "Validate the input size", "Swap the two values if needed",
    "Reset the counter for the next round", "Build the output list", "Compare with the target value",
    "Increase the window size", "Process the remaining elements"};

enum class Lang { Python, Cpp, Java };

class SnippetWriter {
 public:
  // `slot` selects the favoured subset; class 0 never favours anything.
  SnippetWriter(const StyleKnobs& style, std::size_t slot, Rng& rng) : style_(style), slot_(slot), rng_(rng) {
    const double r = uniform01(rng_);
    lang_ = r < 0.8 ? Lang::Python : (r < 0.9 ? Lang::Cpp : Lang::Java);
  }

  Language language() const {
    switch (lang_) {
      case Lang::Python: return Language::Python;
      case Lang::Cpp: return Language::Cpp;
      case Lang::Java: return Language::Java;
    }
    return Language::Python;
  }

  std::string write(std::size_t statements) {
    const std::string fn = name(true);
    params_ = {name(false), name(false)};
    if (params_[1] == params_[0]) params_[1] += "2";
    locals_.clear();
    for (int k = 0; k < 4; ++k) {
      auto v = name(false);
      if (std::find(locals_.begin(), locals_.end(), v) == locals_.end() &&
          std::find(params_.begin(), params_.end(), v) == params_.end())
        locals_.push_back(v);
    }
    if (locals_.empty()) locals_.push_back("acc");

    const bool doc = bernoulli(rng_, style_.docstring);
    if (lang_ == Lang::Python) {
      line(0, "def " + fn + "(" + params_[0] + ", " + params_[1] + "):");
      if (doc) line(1, "\"\"\"" + phrase() + ".\"\"\"");
    } else {
      if (doc) line(0, "/** " + phrase() + ". */");
      const std::string sig = "int " + fn + "(int " + params_[0] + ", int " + params_[1] + ") {";
      line(0, lang_ == Lang::Java ? "public static " + sig : sig);
    }
    declare(1, locals_[0], "0");
    for (std::size_t s = 0; s < statements; ++s) {
      if (bernoulli(rng_, style_.comment_rate)) comment(1, phrase());
      statement(1);
      if (bernoulli(rng_, style_.blank_rate)) out_ += '\n';
    }
    if (bernoulli(rng_, style_.comment_rate)) comment(1, "Return the final answer");
    line(1, "return " + locals_[0] + end());
    if (lang_ != Lang::Python) line(0, "}");
    return out_;
  }

 private:
  std::string name(bool function) {
    if (!bernoulli(rng_, style_.long_names)) {
      if (function) return std::string(kShortNames[uniform_index(rng_, kShortNames.size())]) + "f";
      return std::string(kShortNames[uniform_index(rng_, kShortNames.size())]);
    }
    const bool camel = bernoulli(rng_, style_.camel_case);
    const std::size_t words = 2 + uniform_index(rng_, 2);
    std::string out;
    for (std::size_t w = 0; w < words; ++w) {
      std::string word(kNameWords[pick(kNameWords.size(), 3)]);
      if (w > 0) {
        if (camel)
          word[0] = static_cast<char>(word[0] - 'a' + 'A');
        else
          out += '_';
      }
      out += word;
    }
    return out;
  }

  std::string phrase() { return std::string(kCommentPhrases[pick(kCommentPhrases.size(), 2)]); }

  // Index into a table of size n; with probability `fingerprint` it comes
  // from the `width` consecutive entries owned by this writer's slot.
  std::size_t pick(std::size_t n, std::size_t width) {
    if (slot_ > 0 && bernoulli(rng_, style_.fingerprint)) return (slot_ * width + uniform_index(rng_, width)) % n;
    return uniform_index(rng_, n);
  }

  std::string var() {
    const std::size_t n = locals_.size() + params_.size();
    const std::size_t k = uniform_index(rng_, n);
    return k < locals_.size() ? locals_[k] : params_[k - locals_.size()];
  }
  const std::string& local() { return locals_[uniform_index(rng_, locals_.size())]; }
  std::string num() { return std::to_string(uniform_index(rng_, 100)); }
  std::string end() const { return lang_ == Lang::Python ? "" : ";"; }

  void line(int depth, const std::string& text) {
    out_.append(static_cast<std::size_t>(depth) * 4, ' ');
    out_ += text;
    out_ += '\n';
  }
  void comment(int depth, const std::string& text) { line(depth, (lang_ == Lang::Python ? "# " : "// ") + text); }
  void declare(int depth, const std::string& v, const std::string& value) {
    line(depth, (lang_ == Lang::Python ? "" : "int ") + v + " = " + value + end());
  }

  void statement(int depth) {
    const bool py = lang_ == Lang::Python;
    switch (uniform_index(rng_, 5)) {
      case 0:
        line(depth, local() + " = " + var() + " + " + num() + end());
        break;
      case 1:
        line(depth, local() + " = " + var() + " * " + var() + end());
        break;
      case 2: {
        const std::string it = local();
        if (py) {
          line(depth, "for " + it + " in range(" + var() + "):");
        } else {
          line(depth, "for (int " + it + "_i = 0; " + it + "_i < " + var() + "; " + it + "_i++) {");
        }
        line(depth + 1, locals_[0] + " += " + (py ? it : it + "_i") + end());
        if (!py) line(depth, "}");
        break;
      }
      case 3: {
        const std::string v = local();
        line(depth, "if " + std::string(py ? "" : "(") + v + " > " + num() + (py ? ":" : ") {"));
        line(depth + 1, v + " = " + v + " - " + num() + end());
        if (!py) line(depth, "}");
        break;
      }
      default:
        line(depth, local() + " = max(" + var() + ", " + var() + ")" + end());
        break;
    }
  }

  StyleKnobs style_;
  std::size_t slot_;
  Rng& rng_;
  Lang lang_;
  std::vector<std::string> params_;
  std::vector<std::string> locals_;
  std::string out_;
};

}  // namespace detail

inline StyleKnobs class_style(Task task, ClassIndex label, double style_gap) {
  const auto& targets = style_targets();
  const StyleKnobs& target = (task == Task::A) ? targets[label == 0 ? 0 : 1] : targets.at(label);
  return lerp(kHumanStyle, target, style_gap);
}

inline std::vector<CodeSnippet> synth_corpus(const SynthConfig& cfg) {
  cfg.validate();
  const auto& names = label_names(cfg.task);
  std::vector<CodeSnippet> out;
  for (ClassIndex c = 0; c < cfg.per_class_counts.size(); ++c) {
    const StyleKnobs style = class_style(cfg.task, c, cfg.style_gap);
    for (std::size_t i = 0; i < cfg.per_class_counts[c]; ++i) {
      Rng rng = make_rng(cfg.seed, c, i);
      detail::SnippetWriter writer(style, cfg.task == Task::A ? (c == 0 ? 0 : 1) : c, rng);
      const std::size_t statements =
          cfg.min_statements + uniform_index(rng, cfg.max_statements - cfg.min_statements + 1);
      CodeSnippet s;
      s.code = writer.write(statements);
      s.language = writer.language();
      s.label = c;
      s.label_name = names[c];
      out.push_back(std::move(s));
    }
  }
  Rng order = make_rng(cfg.seed, 0xc0ffee);
  std::shuffle(out.begin(), out.end(), order);
  for (std::size_t i = 0; i < out.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "syn-%06zu", i);
    out[i].id = buf;
  }
  return out;
}

}  // namespace mvd
