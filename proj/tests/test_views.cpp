#include <gtest/gtest.h>

#include "support.hpp"

using namespace mvd;

TEST(DomainPrefix, Serialization) {
  EXPECT_EQ((DomainPrefix{Domain::Mixed, 2, 1, 0}.serialize()), "<dom=mixed;loops=2;fns=1;cls=0>");
  EXPECT_EQ((DomainPrefix{Domain::Clean, 0, 10, 3}.serialize()), "<dom=clean;loops=0;fns=10;cls=3>");
}

TEST(DomainPrefix, CleanFunction) {
  const std::string code =
      "def total(xs):\n"
      "    s = 0\n"
      "    for x in xs:\n"
      "        s += x\n"
      "    if s > 10:\n"
      "        s = 10\n"
      "    while s < 0:\n"
      "        s += 1\n"
      "    s = s * 2\n"
      "    return s\n";
  const auto p = domain_prefix(code, profile_for(Language::Python));
  EXPECT_EQ(p.domain, Domain::Clean);
  EXPECT_EQ(p.functions, 1u);
  EXPECT_EQ(p.classes, 0u);
  EXPECT_EQ(p.loops, 2u);
}

TEST(DomainPrefix, OneLinerIsFragment) {
  EXPECT_EQ(domain_prefix("x = 1", profile_for(Language::Python)).domain, Domain::Fragment);
  EXPECT_EQ(domain_prefix("", profile_for(Language::Python)).domain, Domain::Fragment);
  EXPECT_EQ(domain_prefix("return sorted(arr)[:n//2]", profile_for(Language::Python)).domain, Domain::Fragment);
}

TEST(DomainPrefix, FourProseLinesOfTenIsMixed) {
  const std::string code =
      "Here we compute the running total of values\n"
      "x = 0\n"
      "y = 1\n"
      "The loop below walks over every item\n"
      "for i in range(3):\n"
      "    x += i\n"
      "Afterwards we scale the result by two\n"
      "x = x * 2\n"
      "Finally the value goes back to the caller\n"
      "print(x)\n";
  EXPECT_EQ(domain_prefix(code, profile_for(Language::Python)).domain, Domain::Mixed);
}

TEST(DomainPrefix, ThresholdBoundary) {
  // 3 prose of 10 lines is exactly 0.3, which counts as mixed; 2 of 10 does not.
  std::string three, two;
  for (int i = 0; i < 10; ++i) {
    three += i < 3 ? "we now explain this step\n" : "x = 1\n";
    two += i < 2 ? "we now explain this step\n" : "x = 1\n";
  }
  const auto& py = profile_for(Language::Python);
  EXPECT_EQ(domain_prefix(three, py).domain, Domain::Mixed);
  EXPECT_EQ(domain_prefix(two, py).domain, Domain::Clean);
}

TEST(Delexicalize, SliceExample) {
  EXPECT_EQ(delexicalize(lex("return sorted(arr)[:n//2]", profile_for(Language::Python))),
            "return ID ( ID ) [ : ID // NUM ]");
}

TEST(Delexicalize, EmptyAndNewlines) {
  EXPECT_EQ(delexicalize({}), "");
  EXPECT_EQ(delexicalize(lex("x = 'a'  # c\ny = 2.5", profile_for(Language::Python))), "ID = STR STR\nID = NUM");
}

TEST(Delexicalize, PlaceholdersSurvive) {
  const auto& py = profile_for(Language::Python);
  EXPECT_EQ(delexicalize(lex("ID = STR + NUM", py)), "ID = STR + NUM");
  const std::string once = delexicalize(lex("name = 'v' + 3", py));
  EXPECT_EQ(delexicalize(lex(once, py)), once);
}

TEST(Delexicalize, PropertiesSmall) {
  const auto r = oracle::delex_properties(300, 4);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(AugmentMixed, ZeroProbabilityIsIdentity) {
  Rng rng = make_rng(1);
  EXPECT_EQ(augment_mixed("a = 1\nb = 2", 0.0, rng), "a = 1\nb = 2");
}

TEST(AugmentMixed, CertainInsertionKeepsCodeLinesInOrder) {
  const std::vector<std::string> code_lines = {"a = 1", "b = 2", "c = a + b", "print(c)"};
  std::string code;
  for (std::size_t i = 0; i < code_lines.size(); ++i) code += (i ? "\n" : "") + code_lines[i];
  const auto& pool = fragment_pool();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng = make_rng(seed);
    const auto out = augment_mixed(code, 1.0, rng);
    std::size_t next = 0, inserted = 0;
    for (auto line : split_lines(out)) {
      if (next < code_lines.size() && line == code_lines[next]) {
        ++next;
      } else {
        EXPECT_NE(std::find(pool.begin(), pool.end(), line), pool.end()) << line;
        ++inserted;
      }
    }
    EXPECT_EQ(next, code_lines.size());
    EXPECT_GE(inserted, 1u);
    EXPECT_LE(inserted, 3u);
  }
}

TEST(AugmentMixed, FrequencyMatchesProbability) {
  std::size_t changed = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    Rng rng = make_rng(seed, 77);
    if (augment_mixed("x = 1", 0.4, rng) != "x = 1") ++changed;
  }
  EXPECT_NEAR(static_cast<double>(changed) / 10000.0, 0.4, 0.02);
}

TEST(AugmentMixed, PoolSentencesAreProse) {
  EXPECT_GE(fragment_pool().size(), 20u);
  for (auto s : fragment_pool()) EXPECT_EQ(classify_line(s, profile_for(Language::Unknown)), LineClass::NaturalLanguage) << s;
}

TEST(TokenDropout, Degenerate) {
  const std::vector<TokenId> ids = {5, 6, 7, 1, 8};
  Rng rng = make_rng(2);
  EXPECT_EQ(token_dropout(ids, 0.0, 3, {}, rng), ids);
  EXPECT_EQ(token_dropout(ids, 1.0, 3, {}, rng), std::vector<TokenId>(5, 3));
  EXPECT_EQ(token_dropout(ids, 1.0, 3, {1}, rng), (std::vector<TokenId>{3, 3, 3, 1, 3}));
}

TEST(TokenDropout, Statistics) {
  const auto s = oracle::dropout_stats(100000, 0.15, 9);
  EXPECT_NEAR(s.masked_fraction, 0.15, 0.005);
  EXPECT_TRUE(s.specials_intact);
  EXPECT_TRUE(s.length_kept);
}

TEST(MakeViews, InferModeMixedEqualsOriginal) {
  Rng rng = make_rng(0);
  const auto v = make_views("def f(a):\n    return a", profile_for(Language::Python), ViewMode::Infer, rng);
  EXPECT_EQ(v.mixed, v.original);
  EXPECT_EQ(v.original, v.prefix.serialize() + "\ndef f(a):\n    return a");
  EXPECT_EQ(v.delex, v.prefix.serialize() + "\ndef ID ( ID ) :\nreturn ID");
}

TEST(MakeViews, EmptyCodeIsBarePrefix) {
  Rng rng = make_rng(0);
  const auto v = make_views("", profile_for(Language::Python), ViewMode::Train, rng);
  const std::string head = "<dom=fragment;loops=0;fns=0;cls=0>";
  EXPECT_EQ(v.original, head);
  EXPECT_EQ(v.delex, head);
  EXPECT_EQ(v.mixed, head);
}

TEST(MakeViews, SharedFirstLineAndReproducible) {
  Rng gen = make_rng(31);
  for (int i = 0; i < 200; ++i) {
    const auto code = oracle::random_snippet(gen);
    const auto& profile = oracle::random_profile(gen);
    Rng a = make_rng(i), b = make_rng(i);
    const auto v = make_views(code, profile, ViewMode::Train, a);
    const auto w = make_views(code, profile, ViewMode::Train, b);
    EXPECT_EQ(v.mixed, w.mixed);
    const std::string head = v.prefix.serialize();
    for (const auto* s : {&v.original, &v.delex, &v.mixed}) {
      EXPECT_EQ(s->substr(0, s->find('\n')), head);
    }
  }
}
