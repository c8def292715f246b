#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace a11yrev {

// Two disjoint lists of normalized 1-3 token phrases. A match from the
// accessibility list points to label 1, one from the developer list to 0.
struct KeywordSets {
  std::vector<std::string> accessibility_terms;
  std::vector<std::string> developer_terms;

  // Throws Format for a phrase that is empty, not normalized or longer than
  // three tokens, and Data when a phrase appears in both lists.
  void validate() const;

  bool operator==(const KeywordSets&) const = default;
};

// Whole-token contiguous matching against an already normalized text.
// Matches come back in term order without duplicates.
std::vector<std::string> match_keywords(std::string_view normalized_text, std::span<const std::string> terms);

struct KeywordCandidate {
  std::string phrase;
  double score = 0.0;
  std::size_t pos_freq = 0;
  std::size_t neg_freq = 0;

  bool operator==(const KeywordCandidate&) const = default;
};

// (pos / (neg + 1)) * ln(1 + pos), with frequencies counted as occurrences.
double candidate_score(std::size_t pos_freq, std::size_t neg_freq);

// Every 1..max_n-gram of the normalized positive texts, scored against its
// occurrences in the positive and negative texts; the top_k by descending
// score, ties in lexicographic order.
std::vector<KeywordCandidate> extract_candidates(std::span<const std::string> pos_texts,
                                                 std::span<const std::string> neg_texts, std::size_t max_n,
                                                 std::size_t top_k);

inline constexpr const char* kAccessibilityFile = "accessibility.txt";
inline constexpr const char* kDeveloperFile = "developer.txt";

KeywordSets load_keyword_sets(const std::filesystem::path& dir);
void save_keyword_sets(const KeywordSets& sets, const std::filesystem::path& dir);

}  // namespace a11yrev
