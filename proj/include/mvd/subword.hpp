#pragma once

// Byte-level BPE with reserved special and atomic tokens.
//
// Pre-tokenization splits on whitespace, keeps each newline as its own piece
// and separates word runs from punctuation runs. Every non-atomic piece is
// encoded with a leading space byte, which is how decode recovers piece
// boundaries. Atomic strings (ID, STR, NUM, the domain tags) always map to
// one id and never take part in merges.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mvd/error.hpp"
#include "mvd/types.hpp"

namespace mvd {

inline constexpr std::size_t kNumSpecials = 5;
inline constexpr std::size_t kByteAlphabet = 256;

struct SpecialIds {
  TokenId pad = 0;
  TokenId cls = 1;
  TokenId sep = 2;
  TokenId mask = 3;
  TokenId unk = 4;
};

// Specials first (pad, cls, sep, mask, unk), then atomics.
inline const std::vector<std::string>& default_reserved() {
  static const std::vector<std::string> reserved = {
      "[PAD]", "[CLS]", "[SEP]", "[MASK]", "[UNK]",
      "ID",    "STR",   "NUM",   "<dom=clean", "<dom=mixed", "<dom=fragment"};
  return reserved;
}

struct PreToken {
  std::string_view text;
  bool atomic = false;
};

struct Encoding {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> attention;

  friend bool operator==(const Encoding&, const Encoding&) = default;
};

class Vocab {
 public:
  Vocab() : Vocab(default_reserved()) {}

  // Byte-level vocabulary with no merges.
  explicit Vocab(std::vector<std::string> reserved) : reserved_(std::move(reserved)) {
    if (reserved_.size() < kNumSpecials)
      throw Error(ErrorCode::BadArgument, "need at least 5 reserved tokens (pad, cls, sep, mask, unk)");
    for (const auto& r : reserved_) {
      if (r.empty()) throw Error(ErrorCode::BadArgument, "empty reserved token");
      push_token(r);
    }
    if (id_to_token_.size() != reserved_.size())
      throw Error(ErrorCode::BadArgument, "duplicate reserved token");
    for (std::size_t b = 0; b < kByteAlphabet; ++b) {
      std::string s(1, static_cast<char>(b));
      // Byte symbols get their own ids even if a reserved string matches.
      id_to_token_.push_back(s);
      token_to_id_.emplace(s, static_cast<TokenId>(id_to_token_.size() - 1));
    }
    for (std::size_t k = kNumSpecials; k < reserved_.size(); ++k) atomics_.push_back(reserved_[k]);
    std::stable_sort(atomics_.begin(), atomics_.end(),
                     [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  }

  std::size_t size() const { return id_to_token_.size(); }
  const std::string& token(TokenId id) const { return id_to_token_.at(id); }
  const std::vector<std::string>& reserved() const { return reserved_; }
  const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
  SpecialIds specials() const { return SpecialIds{}; }

  std::unordered_set<TokenId> special_set() const {
    std::unordered_set<TokenId> s;
    for (TokenId id = 0; id < kNumSpecials; ++id) s.insert(id);
    return s;
  }

  bool is_special(TokenId id) const { return id < kNumSpecials; }
  bool is_atomic(TokenId id) const { return id >= kNumSpecials && id < reserved_.size(); }
  TokenId byte_id(unsigned char b) const { return static_cast<TokenId>(reserved_.size() + b); }

  std::optional<TokenId> find(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    if (it == token_to_id_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<TokenId> atomic_id(std::string_view s) const {
    for (std::size_t k = kNumSpecials; k < reserved_.size(); ++k)
      if (reserved_[k] == s) return static_cast<TokenId>(k);
    return std::nullopt;
  }

  // Registers a merge; returns the id of the merged symbol. A merge whose
  // result already exists as a merged or byte symbol reuses that id. A result
  // that spells a reserved string (" I"+"D" never does, "I"+"D" can) gets a
  // fresh id, and `find` returns the merged symbol from then on; atomics are
  // looked up through `atomic_id` only.
  TokenId add_merge(TokenId left, TokenId right) {
    const std::string merged = id_to_token_.at(left) + id_to_token_.at(right);
    TokenId result;
    if (auto it = token_to_id_.find(merged); it != token_to_id_.end() && !is_atomic(it->second) &&
                                             !is_special(it->second)) {
      result = it->second;
    } else {
      id_to_token_.push_back(merged);
      result = static_cast<TokenId>(id_to_token_.size() - 1);
      token_to_id_[merged] = result;
    }
    merges_.emplace_back(id_to_token_[left], id_to_token_[right]);
    merge_table_.emplace(pair_key(left, right), MergeEntry{merges_.size() - 1, result});
    return result;
  }

  std::vector<PreToken> pretokenize(std::string_view text) const {
    std::vector<PreToken> out;
    std::size_t i = 0;
    while (i < text.size()) {
      const auto c = static_cast<unsigned char>(text[i]);
      if (c == '\n') {
        out.push_back({text.substr(i, 1), false});
        ++i;
        continue;
      }
      if (is_blank(c)) {
        ++i;
        continue;
      }
      if (auto len = atomic_at(text, i); len != 0) {
        out.push_back({text.substr(i, len), true});
        i += len;
        continue;
      }
      std::size_t j = i + 1;
      if (is_word(c)) {
        while (j < text.size() && is_word(static_cast<unsigned char>(text[j]))) ++j;
      } else {
        while (j < text.size() && is_punct(static_cast<unsigned char>(text[j])) && atomic_at(text, j) == 0) ++j;
      }
      out.push_back({text.substr(i, j - i), false});
      i = j;
    }
    return out;
  }

  // The text as decode would reproduce it: pre-tokens joined by one space.
  std::string normalize(std::string_view text) const {
    std::string out;
    for (const auto& p : pretokenize(text)) {
      if (!out.empty()) out += ' ';
      out += p.text;
    }
    return out;
  }

  // BPE segmentation of a whole text, without [CLS] or padding.
  std::vector<TokenId> tokenize(std::string_view text) const {
    std::vector<TokenId> ids;
    std::vector<TokenId> sym;
    for (const auto& p : pretokenize(text)) {
      if (p.atomic) {
        ids.push_back(*atomic_id(p.text));
        continue;
      }
      segment(p.text, sym);
      ids.insert(ids.end(), sym.begin(), sym.end());
    }
    return ids;
  }

  // Symbol ids of one non-atomic piece (leading space added here).
  void segment(std::string_view piece, std::vector<TokenId>& sym) const {
    sym.clear();
    sym.push_back(byte_id(' '));
    for (char ch : piece) sym.push_back(byte_id(static_cast<unsigned char>(ch)));
    apply_merges(sym);
  }

  void apply_merges(std::vector<TokenId>& sym) const {
    while (sym.size() > 1) {
      const MergeEntry* best = nullptr;
      std::uint64_t best_key = 0;
      for (std::size_t k = 0; k + 1 < sym.size(); ++k) {
        auto it = merge_table_.find(pair_key(sym[k], sym[k + 1]));
        if (it != merge_table_.end() && (!best || it->second.rank < best->rank)) {
          best = &it->second;
          best_key = it->first;
        }
      }
      if (!best) return;
      merge_in_place(sym, best_key, best->result);
    }
  }

  std::string decode(const std::vector<TokenId>& ids) const {
    std::string out;
    for (TokenId id : ids) {
      if (id >= size()) throw Error(ErrorCode::UnknownId, "token id " + std::to_string(id));
      if (is_special(id)) continue;
      if (is_atomic(id)) out += ' ';
      out += id_to_token_[id];
    }
    if (!out.empty() && out.front() == ' ') out.erase(0, 1);
    return out;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << "bpevocab v1 " << size() << '\n';
    for (const auto& [l, r] : merges_) out << escape(l) << ' ' << escape(r) << '\n';
    out << "#specials\n";
    for (const auto& s : reserved_) out << escape(s) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
  }

  static Vocab load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::string line;
    std::size_t expected = 0;
    {
      std::getline(in, line);
      std::istringstream hdr(line);
      std::string magic, version;
      if (!(hdr >> magic >> version >> expected) || magic != "bpevocab" || version != "v1")
        throw Error(ErrorCode::BadFormat, path + ": bad vocab header");
    }
    std::vector<std::pair<std::string, std::string>> merges;
    std::vector<std::string> reserved;
    bool in_specials = false;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line == "#specials") {
        in_specials = true;
        continue;
      }
      if (in_specials) {
        reserved.push_back(unescape(line, lineno));
        continue;
      }
      auto sp = line.find(' ');
      if (sp == std::string::npos || line.find(' ', sp + 1) != std::string::npos)
        throw Error(ErrorCode::BadFormat, path + ": malformed merge", lineno);
      merges.emplace_back(unescape(line.substr(0, sp), lineno), unescape(line.substr(sp + 1), lineno));
    }
    if (!in_specials) throw Error(ErrorCode::BadFormat, path + ": missing #specials section");
    Vocab v(std::move(reserved));
    for (const auto& [l, r] : merges) {
      auto li = v.find(l), ri = v.find(r);
      if (!li || !ri) throw Error(ErrorCode::BadFormat, path + ": merge references unknown symbol");
      v.add_merge(*li, *ri);
    }
    if (v.size() != expected)
      throw Error(ErrorCode::BadFormat, path + ": header says " + std::to_string(expected) +
                                            " tokens, rebuilt " + std::to_string(v.size()));
    return v;
  }

  static bool is_word(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
           c >= 0x80;
  }
  static bool is_blank(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
  }
  static bool is_punct(unsigned char c) { return c != '\n' && !is_blank(c) && !is_word(c); }

  static std::uint64_t pair_key(TokenId l, TokenId r) {
    return (static_cast<std::uint64_t>(l) << 32) | r;
  }

  // Merges every non-overlapping occurrence of the pair, left to right.
  static void merge_in_place(std::vector<TokenId>& sym, std::uint64_t key, TokenId result) {
    const auto l = static_cast<TokenId>(key >> 32);
    const auto r = static_cast<TokenId>(key & 0xffffffffu);
    std::size_t w = 0;
    for (std::size_t k = 0; k < sym.size();) {
      if (k + 1 < sym.size() && sym[k] == l && sym[k + 1] == r) {
        sym[w++] = result;
        k += 2;
      } else {
        sym[w++] = sym[k++];
      }
    }
    sym.resize(w);
  }

 private:
  struct MergeEntry {
    std::size_t rank;
    TokenId result;
  };

  void push_token(const std::string& s) {
    if (token_to_id_.contains(s)) return;
    id_to_token_.push_back(s);
    token_to_id_.emplace(s, static_cast<TokenId>(id_to_token_.size() - 1));
  }

  // Length of the atomic string starting at i, or 0. Atomics need word
  // boundaries on any side where they begin or end with a word character.
  std::size_t atomic_at(std::string_view text, std::size_t i) const {
    for (const auto& a : atomics_) {
      if (text.size() - i < a.size() || text.compare(i, a.size(), a) != 0) continue;
      const bool word_front = is_word(static_cast<unsigned char>(a.front()));
      const bool word_back = is_word(static_cast<unsigned char>(a.back()));
      if (word_front && i > 0 && is_word(static_cast<unsigned char>(text[i - 1]))) continue;
      const std::size_t end = i + a.size();
      if (word_back && end < text.size() && is_word(static_cast<unsigned char>(text[end]))) continue;
      return a.size();
    }
    return 0;
  }

  static std::string escape(std::string_view s) {
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (char ch : s) {
      const auto c = static_cast<unsigned char>(ch);
      if (c > 0x20 && c < 0x7f && c != '\\' && c != '#') {
        out += ch;
      } else {
        out += "\\x";
        out += hex[c >> 4];
        out += hex[c & 15];
      }
    }
    return out;
  }

  static std::string unescape(std::string_view s, std::size_t lineno) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '\\') {
        out += s[i];
        continue;
      }
      if (s.size() < i + 4 || s[i + 1] != 'x')
        throw Error(ErrorCode::BadFormat, "bad escape", lineno);
      auto nib = [&](char h) -> int {
        if (h >= '0' && h <= '9') return h - '0';
        if (h >= 'a' && h <= 'f') return h - 'a' + 10;
        if (h >= 'A' && h <= 'F') return h - 'A' + 10;
        throw Error(ErrorCode::BadFormat, "bad hex digit", lineno);
      };
      out += static_cast<char>(nib(s[i + 2]) * 16 + nib(s[i + 3]));
      i += 3;
    }
    if (out.empty()) throw Error(ErrorCode::BadFormat, "empty symbol", lineno);
    return out;
  }

  std::vector<std::string> reserved_;
  std::vector<std::string> atomics_;  // longest first
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::unordered_map<std::uint64_t, MergeEntry> merge_table_;
};

// Standard BPE training over byte symbols. The most frequent adjacent pair
// wins; ties go to the lexicographically smallest (left, right) string pair.
// Stops at vocab_size or when no pair is left to merge.
inline Vocab train_bpe(const std::vector<std::string>& corpus, std::size_t vocab_size,
                       const std::vector<std::string>& reserved = default_reserved()) {
  Vocab vocab(reserved);
  if (vocab_size < vocab.size())
    throw Error(ErrorCode::BadArgument, "vocab_size " + std::to_string(vocab_size) +
                                            " below reserved + byte alphabet (" +
                                            std::to_string(vocab.size()) + ")");

  std::unordered_map<std::string, std::int64_t> piece_counts;
  std::size_t total = 0;
  for (const auto& text : corpus) {
    for (const auto& p : vocab.pretokenize(text)) {
      ++total;
      if (!p.atomic) ++piece_counts[std::string(p.text)];
    }
  }
  if (total == 0) throw Error(ErrorCode::CorpusEmpty, "corpus has no tokens");

  // Sorted so that training order does not depend on hash iteration order.
  std::vector<std::pair<std::string, std::int64_t>> pieces(piece_counts.begin(), piece_counts.end());
  std::sort(pieces.begin(), pieces.end());
  std::vector<std::vector<TokenId>> words(pieces.size());
  std::vector<std::int64_t> freq(pieces.size());
  for (std::size_t w = 0; w < pieces.size(); ++w) {
    words[w].push_back(vocab.byte_id(' '));
    for (char ch : pieces[w].first) words[w].push_back(vocab.byte_id(static_cast<unsigned char>(ch)));
    freq[w] = pieces[w].second;
  }

  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where;
  auto add_pairs = [&](std::uint32_t w, std::int64_t sign) {
    const auto& s = words[w];
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const auto key = Vocab::pair_key(s[k], s[k + 1]);
      auto& c = pair_counts[key];
      c += sign * freq[w];
      if (c == 0) pair_counts.erase(key);
      if (sign > 0) {
        auto& list = where[key];
        if (list.empty() || list.back() != w) list.push_back(w);
      }
    }
  };
  for (std::uint32_t w = 0; w < words.size(); ++w) add_pairs(w, +1);

  std::vector<std::uint32_t> touched;
  std::vector<char> seen(words.size(), 0);
  while (vocab.size() < vocab_size) {
    std::uint64_t best = 0;
    std::int64_t best_count = 0;
    for (const auto& [key, count] : pair_counts) {
      if (count <= 0) continue;
      if (count > best_count) {
        best = key;
        best_count = count;
        continue;
      }
      if (count == best_count) {
        const auto& kl = vocab.token(static_cast<TokenId>(key >> 32));
        const auto& kr = vocab.token(static_cast<TokenId>(key & 0xffffffffu));
        const auto& bl = vocab.token(static_cast<TokenId>(best >> 32));
        const auto& br = vocab.token(static_cast<TokenId>(best & 0xffffffffu));
        if (std::tie(kl, kr) < std::tie(bl, br)) best = key;
      }
    }
    if (best_count == 0) break;

    const TokenId merged = vocab.add_merge(static_cast<TokenId>(best >> 32),
                                           static_cast<TokenId>(best & 0xffffffffu));
    touched.clear();
    for (auto w : where[best]) {
      if (seen[w]) continue;
      seen[w] = 1;
      touched.push_back(w);
    }
    where.erase(best);
    for (auto w : touched) {
      seen[w] = 0;
      auto before = words[w].size();
      std::vector<TokenId> updated = words[w];
      Vocab::merge_in_place(updated, best, merged);
      if (updated.size() == before) continue;
      add_pairs(w, -1);
      words[w] = std::move(updated);
      add_pairs(w, +1);
    }
  }
  return vocab;
}

// [CLS] + BPE, first+last truncated to max_len, then right-padded.
inline std::vector<TokenId> truncate_first_last(const std::vector<TokenId>& ids, std::size_t max_len) {
  if (max_len < 2) throw Error(ErrorCode::BadArgument, "max_len must be >= 2");
  if (ids.size() <= max_len) return ids;
  const std::size_t front = (max_len + 1) / 2;
  const std::size_t back = max_len / 2;
  std::vector<TokenId> out(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(front));
  out.insert(out.end(), ids.end() - static_cast<std::ptrdiff_t>(back), ids.end());
  return out;
}

inline Encoding pad_encoding(std::vector<TokenId> ids, std::size_t max_len, TokenId pad) {
  Encoding e;
  e.attention.assign(ids.size(), 1);
  for (std::size_t k = 0; k < ids.size(); ++k)
    if (ids[k] == pad) e.attention[k] = 0;
  ids.resize(max_len, pad);
  e.attention.resize(max_len, 0);
  e.ids = std::move(ids);
  return e;
}

inline Encoding encode(const Vocab& vocab, std::string_view text, std::size_t max_len) {
  if (max_len < 2) throw Error(ErrorCode::BadArgument, "max_len must be >= 2");
  std::vector<TokenId> ids{vocab.specials().cls};
  auto body = vocab.tokenize(text);
  ids.insert(ids.end(), body.begin(), body.end());
  return pad_encoding(truncate_first_last(ids, max_len), max_len, vocab.specials().pad);
}

inline std::string decode(const Vocab& vocab, const std::vector<TokenId>& ids) { return vocab.decode(ids); }

}  // namespace mvd
