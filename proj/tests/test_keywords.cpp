#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "a11yrev/error.hpp"
#include "a11yrev/keywords.hpp"
#include "a11yrev/preprocess.hpp"
#include "support/test_support.hpp"

using namespace a11yrev;
namespace t = a11yrev::testing;

namespace {

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Compares every token window of the text against every phrase.
std::vector<std::string> oracle_match(const std::string& text, const std::vector<std::string>& terms) {
  const auto tokens = words(text);
  std::vector<std::string> out;
  for (const auto& term : terms) {
    const auto needle = words(term);
    bool hit = false;
    for (std::size_t i = 0; !hit && i + needle.size() <= tokens.size(); ++i) {
      hit = std::equal(needle.begin(), needle.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i));
    }
    if (hit && std::find(out.begin(), out.end(), term) == out.end()) out.push_back(term);
  }
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an a11yrev::Error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(MatchKeywords, Examples) {
  const std::vector<std::string> terms{"screen reader", "contrast", "font size"};
  EXPECT_EQ(match_keywords("my screen reader skips the menu", terms), (std::vector<std::string>{"screen reader"}));
  EXPECT_TRUE(match_keywords("the screen is fine reader", terms).empty());
  EXPECT_TRUE(match_keywords("contrasting colours", terms).empty());
  EXPECT_EQ(match_keywords("font size and contrast", terms), (std::vector<std::string>{"contrast", "font size"}));
  EXPECT_TRUE(match_keywords("", terms).empty());
}

TEST(MatchKeywords, AgreesWithWindowOracle) {
  const std::vector<std::string> vocab{"a", "b", "c", "d"};
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (std::size_t i = 0; i < rng() % 9; ++i) text += (i ? " " : "") + vocab[rng() % vocab.size()];
    std::vector<std::string> terms;
    for (std::size_t k = 0; k < 1 + rng() % 5; ++k) {
      std::string term;
      for (std::size_t i = 0; i < 1 + rng() % 3; ++i) term += (i ? " " : "") + vocab[rng() % vocab.size()];
      terms.push_back(term);
    }
    ASSERT_EQ(match_keywords(text, terms), oracle_match(text, terms)) << "text '" << text << "'";
  }
}

TEST(Candidates, ScoreExample) {
  const std::vector<std::string> pos{"font too small", "the font is tiny"};
  const std::vector<std::string> neg{"api is down"};
  const auto top = extract_candidates(pos, neg, 3, 50);
  const auto font = std::find_if(top.begin(), top.end(), [](const auto& c) { return c.phrase == "font"; });
  ASSERT_NE(font, top.end());
  EXPECT_EQ(font->pos_freq, 2u);
  EXPECT_EQ(font->neg_freq, 0u);
  EXPECT_NEAR(font->score, 2.0 * std::log(3.0), 1e-12);
  EXPECT_NEAR(font->score, 2.197, 1e-3);
  EXPECT_EQ(top.front().phrase, "font");
  EXPECT_TRUE(std::none_of(top.begin(), top.end(), [](const auto& c) { return c.phrase == "api"; }));
  const auto is = std::find_if(top.begin(), top.end(), [](const auto& c) { return c.phrase == "is"; });
  ASSERT_NE(is, top.end());
  EXPECT_EQ(is->neg_freq, 1u);
  EXPECT_NEAR(is->score, 0.5 * std::log(2.0), 1e-12);
}

TEST(Candidates, ScoreIsMonotone) {
  for (std::size_t p = 0; p < 20; ++p) {
    for (std::size_t n = 0; n < 20; ++n) {
      EXPECT_LT(candidate_score(p, n), candidate_score(p + 1, n));
      if (p > 0) {
        EXPECT_GT(candidate_score(p, n), candidate_score(p, n + 1));
      } else {
        EXPECT_EQ(candidate_score(p, n), 0.0);
      }
    }
  }
}

TEST(Candidates, LimitsAndErrors) {
  const std::vector<std::string> pos{"alt text missing on every image"};
  const std::vector<std::string> none;
  EXPECT_TRUE(extract_candidates(pos, none, 3, 0).empty());
  const auto grams = extract_candidates(pos, none, 2, 100);
  EXPECT_EQ(grams.size(), 6u + 5u);
  for (std::size_t i = 1; i < grams.size(); ++i) {
    EXPECT_TRUE(grams[i - 1].score > grams[i].score ||
                (grams[i - 1].score == grams[i].score && grams[i - 1].phrase < grams[i].phrase));
  }
  EXPECT_EQ(code_of([&] { extract_candidates(none, pos, 3, 5); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { extract_candidates(pos, none, 0, 5); }), ErrorCode::InvalidArgument);
}

TEST(KeywordFiles, ShippedListsLoadAndRoundTrip) {
  const KeywordSets sets = load_keyword_sets(std::filesystem::path(A11YREV_SOURCE_DIR) / "data" / "keywords");
  EXPECT_FALSE(sets.accessibility_terms.empty());
  EXPECT_FALSE(sets.developer_terms.empty());
  for (const auto& p : sets.accessibility_terms) EXPECT_EQ(normalize(p), p);
  EXPECT_NE(std::find(sets.accessibility_terms.begin(), sets.accessibility_terms.end(), "screen reader"),
            sets.accessibility_terms.end());
  t::TempDir dir;
  save_keyword_sets(sets, dir / "kw");
  EXPECT_EQ(load_keyword_sets(dir / "kw"), sets);
}

TEST(KeywordFiles, RejectsOverlapAndUnnormalizedPhrases) {
  t::TempDir dir;
  t::write_file(dir / "accessibility.txt", "contrast\nzoom\n");
  t::write_file(dir / "developer.txt", "api\nzoom\n");
  EXPECT_EQ(code_of([&] { load_keyword_sets(dir.path()); }), ErrorCode::Data);
  t::write_file(dir / "developer.txt", "API\n");
  EXPECT_EQ(code_of([&] { load_keyword_sets(dir.path()); }), ErrorCode::Format);
  t::write_file(dir / "developer.txt", "one two three four\n");
  EXPECT_EQ(code_of([&] { load_keyword_sets(dir.path()); }), ErrorCode::Format);
  EXPECT_EQ(code_of([&] { load_keyword_sets(dir / "missing"); }), ErrorCode::Io);
}
