#include "a11yrev/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "a11yrev/error.hpp"
#include "a11yrev/preprocess.hpp"

namespace a11yrev {
namespace {

std::vector<std::string_view> split_spaces(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(' ', start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) tokens.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

bool contains_sequence(std::span<const std::string_view> haystack, std::span<const std::string_view> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  }
  return false;
}

template <typename Visit>
void for_each_ngram(const std::vector<std::string>& tokens, std::size_t max_n, Visit&& visit) {
  std::string gram;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    gram.clear();
    for (std::size_t n = 1; n <= max_n && i + n <= tokens.size(); ++n) {
      if (n > 1) gram.push_back(' ');
      gram += tokens[i + n - 1];
      visit(gram);
    }
  }
}

void check_phrase(const std::string& phrase, const std::string& where) {
  if (phrase.empty()) fail(ErrorCode::Format, where + ": empty keyword phrase");
  if (normalize(phrase) != phrase) fail(ErrorCode::Format, where + ": phrase '" + phrase + "' is not normalized");
  if (split_spaces(phrase).size() > 3) fail(ErrorCode::Format, where + ": phrase '" + phrase + "' exceeds 3 tokens");
}

std::vector<std::string> read_phrases(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read keyword file '" + path.string() + "'");
  std::vector<std::string> phrases;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    check_phrase(line, path.string() + ":" + std::to_string(line_no));
    if (seen.insert(line).second) phrases.push_back(line);
  }
  return phrases;
}

void write_phrases(const std::vector<std::string>& phrases, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write keyword file '" + path.string() + "'");
  for (const auto& phrase : phrases) out << phrase << '\n';
  if (!out.flush()) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

}  // namespace

void KeywordSets::validate() const {
  for (const auto& p : accessibility_terms) check_phrase(p, "accessibility terms");
  for (const auto& p : developer_terms) check_phrase(p, "developer terms");
  const std::unordered_set<std::string> accessibility(accessibility_terms.begin(), accessibility_terms.end());
  for (const auto& p : developer_terms) {
    if (accessibility.contains(p)) fail(ErrorCode::Data, "keyword '" + p + "' appears in both keyword sets");
  }
}

std::vector<std::string> match_keywords(std::string_view normalized_text, std::span<const std::string> terms) {
  const auto tokens = split_spaces(normalized_text);
  std::vector<std::string> matches;
  for (const auto& term : terms) {
    if (std::find(matches.begin(), matches.end(), term) != matches.end()) continue;
    const auto needle = split_spaces(term);
    if (contains_sequence(tokens, needle)) matches.push_back(term);
  }
  return matches;
}

double candidate_score(std::size_t pos_freq, std::size_t neg_freq) {
  const double pos = static_cast<double>(pos_freq);
  return pos / (static_cast<double>(neg_freq) + 1.0) * std::log1p(pos);
}

std::vector<KeywordCandidate> extract_candidates(std::span<const std::string> pos_texts,
                                                 std::span<const std::string> neg_texts, std::size_t max_n,
                                                 std::size_t top_k) {
  if (pos_texts.empty()) fail(ErrorCode::InvalidArgument, "keyword extraction needs positive texts");
  if (max_n < 1) fail(ErrorCode::InvalidArgument, "max_n must be at least 1");

  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& text : pos_texts) {
    for_each_ngram(tokenize(text), max_n, [&](const std::string& gram) { ++counts[gram].first; });
  }
  for (const auto& text : neg_texts) {
    for_each_ngram(tokenize(text), max_n, [&](const std::string& gram) {
      if (auto it = counts.find(gram); it != counts.end()) ++it->second.second;
    });
  }

  std::vector<KeywordCandidate> candidates;
  candidates.reserve(counts.size());
  for (const auto& [phrase, freq] : counts) {
    candidates.push_back({phrase, candidate_score(freq.first, freq.second), freq.first, freq.second});
  }
  auto better = [](const KeywordCandidate& a, const KeywordCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.phrase < b.phrase;
  };
  const std::size_t keep = std::min(top_k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(), better);
  candidates.resize(keep);
  return candidates;
}

KeywordSets load_keyword_sets(const std::filesystem::path& dir) {
  KeywordSets sets;
  sets.accessibility_terms = read_phrases(dir / kAccessibilityFile);
  sets.developer_terms = read_phrases(dir / kDeveloperFile);
  sets.validate();
  return sets;
}

void save_keyword_sets(const KeywordSets& sets, const std::filesystem::path& dir) {
  sets.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create keyword directory '" + dir.string() + "'");
  write_phrases(sets.accessibility_terms, dir / kAccessibilityFile);
  write_phrases(sets.developer_terms, dir / kDeveloperFile);
}

}  // namespace a11yrev
