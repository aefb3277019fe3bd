#pragma once

// Labelled snippets and their JSON Lines form:
//   {"id": "...", "code": "...", "language": "python" | null, "label": "human"}

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mvd/error.hpp"
#include "mvd/lexer.hpp"
#include "mvd/types.hpp"

namespace mvd {

inline const std::vector<std::string>& label_names(Task task) {
  static const std::vector<std::string> a = {"human", "machine"};
  static const std::vector<std::string> b = {"Human",       "OpenAI",  "Meta-LLaMA", "IBM-Granite",
                                             "Qwen",        "Phi",     "DeepSeek-AI", "Mistral",
                                             "01-ai",       "BigCode", "Gemma"};
  return task == Task::A ? a : b;
}

// Training-set sizes per class for task B, in label order.
inline constexpr std::array<std::size_t, 11> kTaskBCounts = {442000, 10000, 8000, 8000, 8000, 5000,
                                                             4000,   4000,  3000, 2000, 2000};
// Stated corpus size. The rounded per-class counts above sum to 496,000.
inline constexpr std::size_t kTaskBTotal = 500000;

inline std::optional<ClassIndex> find_label(Task task, std::string_view name) {
  const auto& names = label_names(task);
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k].size() != name.size()) continue;
    bool eq = std::equal(name.begin(), name.end(), names[k].begin(), [](char x, char y) {
      return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
    });
    if (eq) return k;
  }
  return std::nullopt;
}

inline Task parse_task(std::string_view s) {
  if (s == "a" || s == "A") return Task::A;
  if (s == "b" || s == "B") return Task::B;
  throw Error(ErrorCode::BadArgument, "task must be a or b, got '" + std::string(s) + "'");
}

struct CodeSnippet {
  std::string id;
  std::string code;
  std::optional<Language> language;
  ClassIndex label = 0;
  std::string label_name;

  const LanguageProfile& profile() const { return profile_for(language.value_or(Language::Unknown)); }

  friend bool operator==(const CodeSnippet&, const CodeSnippet&) = default;
};

// A record before label validation; used for unlabeled prediction inputs.
struct RawRecord {
  std::string id;
  std::string code;
  std::optional<Language> language;
  std::optional<std::string> label;
};

namespace detail {

inline RawRecord parse_record(const std::string& line, std::size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what(), lineno);
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "record is not an object", lineno);
  RawRecord r;
  auto id = j.find("id");
  auto code = j.find("code");
  if (id == j.end() || !(id->is_string() || id->is_number_integer()))
    throw Error(ErrorCode::ParseError, "missing or invalid \"id\"", lineno);
  if (code == j.end() || !code->is_string())
    throw Error(ErrorCode::ParseError, "missing or invalid \"code\"", lineno);
  r.id = id->is_string() ? id->get<std::string>() : std::to_string(id->get<long long>());
  r.code = code->get<std::string>();
  if (auto lang = j.find("language"); lang != j.end() && !lang->is_null()) {
    if (!lang->is_string()) throw Error(ErrorCode::ParseError, "\"language\" must be a string or null", lineno);
    r.language = parse_language(lang->get<std::string>());
  }
  if (auto label = j.find("label"); label != j.end() && !label->is_null()) {
    if (!label->is_string()) throw Error(ErrorCode::ParseError, "\"label\" must be a string", lineno);
    r.label = label->get<std::string>();
  }
  return r;
}

}  // namespace detail

// Blank lines are skipped; line numbers in errors are 1-based file lines.
inline std::vector<RawRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<RawRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(detail::parse_record(line, lineno));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyFile, path + " has no records");
  return out;
}

inline std::vector<CodeSnippet> load_dataset(const std::string& path, Task task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<CodeSnippet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    RawRecord r = detail::parse_record(line, lineno);
    if (!r.label) throw Error(ErrorCode::UnknownLabel, "record has no label", lineno);
    auto idx = find_label(task, *r.label);
    if (!idx) throw Error(ErrorCode::UnknownLabel, "label '" + *r.label + "'", lineno);
    out.push_back(CodeSnippet{std::move(r.id), std::move(r.code), r.language, *idx, label_names(task)[*idx]});
  }
  if (out.empty()) throw Error(ErrorCode::EmptyFile, path + " has no records");
  return out;
}

inline nlohmann::json to_json(const CodeSnippet& s) {
  nlohmann::json j;
  j["id"] = s.id;
  j["code"] = s.code;
  j["language"] = s.language ? nlohmann::json(std::string(language_name(*s.language))) : nlohmann::json(nullptr);
  j["label"] = s.label_name;
  return j;
}

inline void write_dataset(const std::string& path, const std::vector<CodeSnippet>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  for (const auto& s : data) out << to_json(s).dump() << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

inline std::vector<std::size_t> class_counts(const std::vector<CodeSnippet>& data, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (const auto& s : data) {
    if (s.label >= k) throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(s.label));
    ++counts[s.label];
  }
  return counts;
}

}  // namespace mvd
