#pragma once

// Oracles and property checkers shared by the unit tests and the acceptance
// runner. Oracles here are written independently of the library code paths
// they check.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "mvd/mvd.hpp"

namespace mvd::oracle {

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

// ---------------------------------------------------------------- generators

inline constexpr std::string_view kFragments[] = {
    "x", "value", "ID", "STR", "NUM", "_tmp", "camelCase", "snake_case2", "for", "while", "if", "return",
    "def", "class", "function", "int", "public", "static", "struct", "func", "foreach", "0", "42", "3.14",
    "1e-9", "0x1F", "0b101", "1_000", "7L", "\"hi\"", "'c'", "\"a\\\"b\"", "\"\"\"doc\"\"\"", "`tmpl ${x}`",
    "r\"raw\\n\"", "# note", "// note", "/* block */", "(", ")", "{", "}", "[", "]", ";", ",", ".", ":",
    "=", "==", "!=", "<=", ">=", "+=", "->", "=>", "::", "&&", "||", "//", "**", "%", "@", "$x", "#",
    "\n", "\n", "\n", " ", " ", "  ", "\t", "é", "日本", "\x01", "\x7f", "'", "\"", "/*", "\\"};

inline std::string random_snippet(Rng& rng, std::size_t max_pieces = 40) {
  const std::size_t n = uniform_index(rng, max_pieces + 1);
  std::string s;
  for (std::size_t k = 0; k < n; ++k) {
    s += kFragments[uniform_index(rng, std::size(kFragments))];
    if (bernoulli(rng, 0.5)) s += ' ';
  }
  return s;
}

inline std::string random_bytes(Rng& rng, std::size_t max_len = 64) {
  const std::size_t n = uniform_index(rng, max_len + 1);
  std::string s(n, '\0');
  for (auto& c : s) c = static_cast<char>(uniform_index(rng, 256));
  return s;
}

inline const LanguageProfile& random_profile(Rng& rng) {
  static constexpr Language all[] = {Language::Python, Language::Cpp,  Language::Java, Language::JavaScript,
                                     Language::CSharp, Language::Php,  Language::Go,   Language::C,
                                     Language::Unknown};
  return profile_for(all[uniform_index(rng, std::size(all))]);
}

// ------------------------------------------------------------------- lexer

inline bool skippable(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

// Token texts plus skipped whitespace rebuild the input byte for byte.
inline Check reconstruction(std::string_view code, const LanguageProfile& profile) {
  Check r;
  const auto toks = lex(code, profile);
  std::size_t pos = 0;
  std::string rebuilt;
  for (const auto& t : toks) {
    if (t.text.empty()) r.fail("empty token");
    if (t.offset < pos) {
      r.fail("overlapping tokens");
      break;
    }
    for (std::size_t k = pos; k < t.offset; ++k) {
      if (!skippable(code[k])) r.fail("non-whitespace byte skipped at offset " + std::to_string(k));
      rebuilt += code[k];
    }
    if (code.substr(t.offset, t.text.size()) != t.text) r.fail("token text is not a source slice");
    if (t.kind == TokenKind::Keyword && !profile.keywords.contains(t.text)) r.fail("keyword not in table");
    if (t.kind == TokenKind::Identifier && profile.keywords.contains(t.text)) r.fail("identifier in keyword table");
    rebuilt += t.text;
    pos = t.offset + t.text.size();
  }
  for (std::size_t k = pos; k < code.size(); ++k) {
    if (!skippable(code[k])) r.fail("trailing non-whitespace skipped");
    rebuilt += code[k];
  }
  if (rebuilt != code) r.fail("rebuilt text differs");
  return r;
}

inline Check lexer_fuzz(std::size_t n, std::uint64_t seed) {
  Check r;
  Rng rng = make_rng(seed);
  for (std::size_t i = 0; i < n && r.ok; ++i) {
    const std::string code = (i % 2) ? random_bytes(rng) : random_snippet(rng);
    const auto& profile = random_profile(rng);
    Check c = reconstruction(code, profile);
    if (!c.ok) r.fail("input " + std::to_string(i) + " (" + std::string(language_name(profile.name)) + "): " + c.detail);
  }
  return r;
}

// ------------------------------------------------------------------- views

inline std::vector<std::string> split_words_keep_newlines(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\n') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      if (c == '\n') out.emplace_back("\n");
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline Check delex_properties(std::size_t n, std::uint64_t seed) {
  Check r;
  Rng rng = make_rng(seed);
  for (std::size_t i = 0; i < n && r.ok; ++i) {
    const std::string code = random_snippet(rng);
    const auto& profile = random_profile(rng);
    const auto toks = lex(code, profile);
    const std::string once = delexicalize(toks);
    const std::string twice = delexicalize(lex(once, profile));
    if (once != twice) {
      r.fail("idempotence, snippet " + std::to_string(i));
      break;
    }
    std::vector<std::string> skeleton;
    for (const auto& t : toks)
      if (t.kind == TokenKind::Keyword || t.kind == TokenKind::Punct || t.kind == TokenKind::Newline)
        skeleton.emplace_back(t.text);
    std::vector<std::string> kept;
    for (auto& w : split_words_keep_newlines(once))
      if (w != "ID" && w != "STR" && w != "NUM") kept.push_back(w);
    if (kept != skeleton) r.fail("skeleton, snippet " + std::to_string(i));
  }
  return r;
}

// -------------------------------------------------------------- truncation

inline Check truncation_laws(std::uint64_t seed) {
  Check r;
  Rng rng = make_rng(seed);
  for (int i = 0; i < 2000 && r.ok; ++i) {
    const std::size_t len = uniform_index(rng, 200);
    const std::size_t max_len = 2 + uniform_index(rng, 100);
    std::vector<TokenId> ids(len);
    for (auto& x : ids) x = static_cast<TokenId>(uniform_index(rng, 1000));
    const auto t = truncate_first_last(ids, max_len);
    if (len <= max_len) {
      if (t != ids) r.fail("short input changed");
      continue;
    }
    if (t.size() != max_len) r.fail("wrong length");
    const std::size_t front = (max_len + 1) / 2, back = max_len / 2;
    if (!std::equal(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(front), ids.begin()))
      r.fail("front is not a prefix");
    if (!std::equal(t.end() - static_cast<std::ptrdiff_t>(back), t.end(), ids.end() - static_cast<std::ptrdiff_t>(back)))
      r.fail("back is not a suffix");
  }
  return r;
}

// ------------------------------------------------------------ token dropout

struct DropoutStats {
  double masked_fraction = 0.0;
  bool specials_intact = true;
  bool length_kept = true;
};

inline DropoutStats dropout_stats(std::size_t n_tokens, double rate, std::uint64_t seed) {
  Rng gen = make_rng(seed, 1);
  Rng rng = make_rng(seed, 2);
  const std::unordered_set<TokenId> specials{0, 1, 2, 3, 4};
  const TokenId mask = 3;
  std::vector<TokenId> ids(n_tokens);
  for (auto& x : ids) x = static_cast<TokenId>(uniform_index(gen, 300));
  const auto out = token_dropout(ids, rate, mask, specials, rng);
  DropoutStats s;
  s.length_kept = out.size() == ids.size();
  std::size_t eligible = 0, masked = 0;
  for (std::size_t k = 0; k < ids.size() && k < out.size(); ++k) {
    if (specials.contains(ids[k])) {
      if (out[k] != ids[k]) s.specials_intact = false;
      continue;
    }
    ++eligible;
    if (out[k] == mask) ++masked;
  }
  s.masked_fraction = eligible ? static_cast<double>(masked) / static_cast<double>(eligible) : 0.0;
  return s;
}

// ----------------------------------------------------------- softmax / KL

inline std::vector<double> random_logits(Rng& rng, std::size_t k, double scale = 4.0) {
  std::vector<double> v(k);
  for (auto& x : v) x = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

inline double oracle_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += p[k] * std::log(p[k] / q[k]);
  return s;
}

inline Check softmax_symkl_invariants(std::uint64_t seed) {
  Check r;
  Rng rng = make_rng(seed);
  for (int i = 0; i < 2000 && r.ok; ++i) {
    const std::size_t k = 2 + uniform_index(rng, 11);
    const auto a = random_logits(rng, k), b = random_logits(rng, k);
    const Dist p = softmax(a), q = softmax(b);
    double sum = 0.0;
    for (double x : p.p) {
      if (!(x > 0.0 && x < 1.0)) r.fail("softmax entry outside (0,1)");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) r.fail("softmax does not sum to 1");
    auto shifted = a;
    const double c = 10.0 * (2.0 * uniform01(rng) - 1.0);
    for (auto& x : shifted) x += c;
    const Dist ps = softmax(shifted);
    for (std::size_t j = 0; j < k; ++j)
      if (std::abs(ps[j] - p[j]) > 1e-12) r.fail("softmax not shift invariant");
    const double pq = sym_kl(p, q), qp = sym_kl(q, p);
    if (pq < 0.0) r.fail("sym_kl negative");
    if (pq != qp) r.fail("sym_kl asymmetric");
    if (std::abs(sym_kl(p, p)) > 1e-12) r.fail("sym_kl(p,p) != 0");
    const double expect = 0.5 * (oracle_kl(p.p, q.p) + oracle_kl(q.p, p.p));
    if (std::abs(pq - expect) > 1e-10) r.fail("sym_kl disagrees with the direct sum");
  }
  return r;
}

// ---------------------------------------------------------------------- auc

// Pairwise count; independent of the rank-sum implementation.
inline double oracle_auc(const std::vector<double>& s, const std::vector<int>& g) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (g[i] == 1 && g[j] == 0) {
        pairs += 1.0;
        good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return good / pairs;
}

inline Check auc_examples(std::uint64_t seed) {
  Check r;
  auto near = [&](double got, double want, const char* what) {
    if (std::abs(got - want) > 1e-12) r.fail(std::string(what) + ": got " + std::to_string(got));
  };
  near(auc(std::vector<double>{0.9, 0.8, 0.3, 0.2}, std::vector<int>{1, 1, 0, 0}), 1.0, "perfect ranking");
  near(auc(std::vector<double>{0.9, 0.4, 0.6, 0.2}, std::vector<int>{1, 0, 0, 1}), 0.5, "two of four pairs");
  near(auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, std::vector<int>{1, 0, 1, 0}), 0.5, "all tied");
  Rng rng = make_rng(seed);
  for (int i = 0; i < 300 && r.ok; ++i) {
    const std::size_t n = 2 + uniform_index(rng, 40);
    std::vector<double> s(n);
    std::vector<int> g(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = static_cast<double>(uniform_index(rng, 8));  // frequent ties
      g[k] = static_cast<int>(uniform_index(rng, 2));
    }
    g[0] = 0;
    g[1] = 1;
    const double a = auc(s, g);
    near(a, oracle_auc(s, g), "random instance");
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = std::exp(0.7 * s[k]) - 3.0;
    near(auc(t, g), a, "monotone transform");
  }
  return r;
}

// ------------------------------------------------------------- round trip

inline Check roundtrip(const Vocab& vocab, std::size_t n, std::uint64_t seed) {
  Check r;
  Rng rng = make_rng(seed);
  for (std::size_t i = 0; i < n && r.ok; ++i) {
    const std::string text = random_snippet(rng, 25);
    const auto enc = encode(vocab, text, 4096);
    const std::string back = decode(vocab, enc.ids);
    if (back != vocab.normalize(text)) r.fail("round trip differs for snippet " + std::to_string(i));
  }
  if (decode(vocab, encode(vocab, "for ID in STR", 64).ids) != "for ID in STR") r.fail("for ID in STR");
  return r;
}

// ------------------------------------------------------- model / gradients

// Straight-line forward pass over raw storage.
inline std::vector<double> oracle_forward(const ModelParams& p, const Encoding& e) {
  const std::size_t V = p.dims.vocab, d = p.dims.embed, h = p.dims.hidden, K = p.dims.classes;
  (void)V;
  std::vector<double> v(d, 0.0);
  double cnt = 0.0;
  for (std::size_t t = 0; t < e.ids.size(); ++t) {
    if (e.attention[t] == 0) continue;
    for (std::size_t i = 0; i < d; ++i) v[i] += p.embed.data[e.ids[t] * d + i];
    cnt += 1.0;
  }
  if (cnt > 0.0)
    for (auto& x : v) x /= cnt;
  std::vector<double> z(h);
  for (std::size_t j = 0; j < h; ++j) {
    double s = p.b1[j];
    for (std::size_t i = 0; i < d; ++i) s += p.w1.data[i * h + j] * v[i];
    z[j] = s > 0.0 ? s : 0.0;
  }
  std::vector<double> out(K);
  for (std::size_t c = 0; c < K; ++c) {
    double s = p.b2[c];
    for (std::size_t j = 0; j < h; ++j) s += p.w2.data[j * K + c] * z[j];
    out[c] = s;
  }
  return out;
}

inline ModelParams random_params(const ModelDims& dims, Rng& rng, double scale = 1.0) {
  ModelParams p = ModelParams::zeros(dims);
  for (auto t : p.tensors())
    for (auto& x : t) x = scale * (2.0 * uniform01(rng) - 1.0);
  return p;
}

inline Encoding random_encoding(std::size_t vocab, Rng& rng, std::size_t max_len = 10) {
  const std::size_t len = 1 + uniform_index(rng, max_len);
  const std::size_t live = 1 + uniform_index(rng, len);
  Encoding e;
  for (std::size_t k = 0; k < len; ++k) {
    const bool on = k < live;
    e.ids.push_back(on ? static_cast<TokenId>(1 + uniform_index(rng, vocab - 1)) : 0);
    e.attention.push_back(on ? 1 : 0);
  }
  return e;
}

inline double relative_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6});
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t instances = 0;
  std::size_t resampled = 0;
  std::size_t parameters_checked = 0;
};

// Finite-difference check of the full objective: multiview_loss over the
// three view logits, each from the shared parameters. Instances with a hidden
// pre-activation within 1e-3 of the ReLU kink are redrawn.
inline GradCheckResult gradient_check(std::size_t instances, std::uint64_t seed, double eps = 1e-4) {
  GradCheckResult res;
  Rng rng = make_rng(seed);
  while (res.instances < instances) {
    ModelDims dims;
    dims.vocab = 2 + uniform_index(rng, 31);
    dims.embed = 1 + uniform_index(rng, 8);
    dims.hidden = 1 + uniform_index(rng, 8);
    dims.classes = bernoulli(rng, 0.5) ? 2 : 11;
    ModelParams p = random_params(dims, rng);
    const Encoding eo = random_encoding(dims.vocab, rng), ed = random_encoding(dims.vocab, rng),
                   em = random_encoding(dims.vocab, rng);
    bool near_kink = false;
    for (const Encoding* e : {&eo, &ed, &em})
      for (double z : forward_trace(p, *e).pre)
        if (std::abs(z) < 1e-3) near_kink = true;
    if (near_kink) {
      ++res.resampled;
      continue;
    }
    LossConfig cfg;
    cfg.label_smoothing = 0.3 * uniform01(rng);
    cfg.lambda = 0.1 + 1.4 * uniform01(rng);
    if (bernoulli(rng, 0.5)) {
      std::vector<double> w(dims.classes);
      for (auto& x : w) x = 0.2 + 2.8 * uniform01(rng);
      cfg.class_weights = w;
    }
    const ClassIndex label = uniform_index(rng, dims.classes);

    auto objective = [&](const ModelParams& q) {
      return multiview_loss(forward(q, eo), forward(q, ed), forward(q, em), label, cfg).loss;
    };
    const auto mv = multiview_loss(forward(p, eo), forward(p, ed), forward(p, em), label, cfg);
    const Gradients g = backward(p, {{&eo, mv.grad_original}, {&ed, mv.grad_delex}, {&em, mv.grad_mixed}});

    auto pt = p.tensors();
    auto gt = g.tensors();
    for (std::size_t t = 0; t < pt.size(); ++t) {
      for (std::size_t i = 0; i < pt[t].size(); ++i) {
        const double saved = pt[t][i];
        pt[t][i] = saved + eps;
        const double up = objective(p);
        pt[t][i] = saved - eps;
        const double down = objective(p);
        pt[t][i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        res.max_rel_error = std::max(res.max_rel_error, relative_error(gt[t][i], numeric));
        ++res.parameters_checked;
      }
    }
    ++res.instances;
  }
  return res;
}

// ----------------------------------------------------------------- corpora

inline std::vector<ClassIndex> gold_of(const std::vector<CodeSnippet>& data) {
  std::vector<ClassIndex> g;
  g.reserve(data.size());
  for (const auto& s : data) g.push_back(s.label);
  return g;
}

inline std::vector<CodeSnippet> synth(Task task, std::vector<std::size_t> counts, std::uint64_t seed,
                                      double gap = 0.8, std::size_t min_st = 4, std::size_t max_st = 10) {
  SynthConfig sc;
  sc.task = task;
  sc.per_class_counts = std::move(counts);
  sc.seed = seed;
  sc.style_gap = gap;
  sc.min_statements = min_st;
  sc.max_statements = max_st;
  return synth_corpus(sc);
}

}  // namespace mvd::oracle
