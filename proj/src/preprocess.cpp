#include "a11yrev/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "a11yrev/error.hpp"
#include "json.hpp"

namespace a11yrev {
namespace {

bool is_punct_or_symbol(UChar32 c) {
  constexpr std::uint32_t mask = U_GC_P_MASK | U_GC_S_MASK;
  return (U_GET_GC_MASK(c) & mask) != 0;
}

std::u32string decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? 0xFFFD : static_cast<char32_t>(c));
  }
  return out;
}

void append_utf8(std::string& out, char32_t c) {
  std::uint8_t buffer[U8_MAX_LENGTH];
  std::int32_t length = 0;
  [[maybe_unused]] UBool error = false;
  U8_APPEND(buffer, length, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
  out.append(reinterpret_cast<const char*>(buffer), static_cast<std::size_t>(length));
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) append_utf8(out, c);
  return out;
}

bool is_ascii_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

class SpellIndex {
 public:
  explicit SpellIndex(const Lexicon& lexicon) : lexicon_(lexicon) {
    std::set<char32_t> alphabet;
    for (const auto& word : lexicon) {
      for (char32_t c : decode(word)) alphabet.insert(c);
    }
    alphabet_.assign(alphabet.begin(), alphabet.end());
  }

  std::string correct(const std::string& token) const {
    if (lexicon_.contains(token)) return token;
    const std::u32string word = decode(token);
    std::unordered_set<std::string> hits;
    auto probe = [&](const std::u32string& candidate) {
      std::string utf8 = encode(candidate);
      if (lexicon_.contains(utf8)) hits.insert(std::move(utf8));
    };
    std::u32string scratch;
    for (std::size_t i = 0; i < word.size(); ++i) {
      scratch = word;
      scratch.erase(i, 1);
      probe(scratch);
      for (char32_t c : alphabet_) {
        if (c == word[i]) continue;
        scratch = word;
        scratch[i] = c;
        probe(scratch);
      }
    }
    for (std::size_t i = 0; i <= word.size(); ++i) {
      for (char32_t c : alphabet_) {
        scratch = word;
        scratch.insert(scratch.begin() + static_cast<std::ptrdiff_t>(i), c);
        probe(scratch);
      }
    }
    return hits.size() == 1 ? *hits.begin() : token;
  }

 private:
  const Lexicon& lexicon_;
  std::vector<char32_t> alphabet_;
};

std::string correct_with(std::string_view text, const SpellIndex& index) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_ascii_space(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !is_ascii_space(text[end])) ++end;
    out += index.correct(std::string(text.substr(i, end - i)));
    i = end;
  }
  return out;
}

}  // namespace

std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t c : decode(text)) {
    const auto cp = static_cast<UChar32>(c);
    if (u_isUWhiteSpace(cp) || is_punct_or_symbol(cp)) {
      pending_space = true;
      continue;
    }
    const auto lowered = u_tolower(cp);
    // Case mapping can in principle land on a separator; treat it as one.
    if (u_isUWhiteSpace(lowered) || is_punct_or_symbol(lowered)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    append_utf8(out, static_cast<char32_t>(lowered));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  const std::string normalized = normalize(text);
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < normalized.size()) {
    std::size_t end = normalized.find(' ', start);
    if (end == std::string::npos) end = normalized.size();
    tokens.emplace_back(normalized, start, end - start);
    start = end + 1;
  }
  return tokens;
}

std::size_t word_count(std::string_view text) { return tokenize(text).size(); }

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read lexicon '" + path.string() + "'");
  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::string word = normalize(line);
    if (word.empty()) continue;
    if (word != line || word.find(' ') != std::string::npos) {
      fail(ErrorCode::Format, path.string() + ":" + std::to_string(line_no) +
                                  ": lexicon entry '" + line + "' is not a single lowercase word");
    }
    lexicon.insert(std::move(word));
  }
  if (lexicon.empty()) fail(ErrorCode::Data, "lexicon '" + path.string() + "' is empty");
  return lexicon;
}

std::string correct_spelling(std::string_view text, const Lexicon& lexicon) {
  if (lexicon.empty()) return std::string(text);
  return correct_with(text, SpellIndex(lexicon));
}

void PreprocessConfig::validate() const {
  if (min_words < 1) fail(ErrorCode::InvalidArgument, "min_words must be at least 1");
  if (spell_correction == SpellCorrection::Lexicon && !lexicon_path) {
    fail(ErrorCode::InvalidArgument, "spell correction requires a lexicon path");
  }
}

std::string to_json(const PreprocessReport& report) {
  nlohmann::ordered_json object;
  object["input_count"] = report.input_count;
  object["corrected_count"] = report.corrected_count;
  object["removed_short"] = report.removed_short;
  object["removed_duplicate"] = report.removed_duplicate;
  object["output_count"] = report.output_count;
  return object.dump();
}

Preprocessor::Preprocessor(PreprocessConfig config) : config_(std::move(config)) {
  config_.validate();
  if (config_.spell_correction == SpellCorrection::Lexicon) lexicon_ = load_lexicon(*config_.lexicon_path);
}

std::string Preprocessor::clean(std::string_view raw_text) const {
  std::string text = normalize(raw_text);
  if (config_.spell_correction == SpellCorrection::Lexicon) text = correct_spelling(text, lexicon_);
  return text;
}

LabeledDataset Preprocessor::run(const LabeledDataset& dataset, PreprocessReport* report) const {
  if (dataset.empty()) fail(ErrorCode::InvalidArgument, "preprocess: dataset is empty");
  const bool correcting = config_.spell_correction == SpellCorrection::Lexicon;
  std::optional<SpellIndex> index;
  if (correcting) index.emplace(lexicon_);

  PreprocessReport tally;
  tally.input_count = dataset.size();
  LabeledDataset out;
  out.provenance = dataset.provenance;
  std::unordered_set<std::string> seen;
  for (const Review& review : dataset.reviews) {
    std::string text = normalize(review.raw_text);
    if (correcting) {
      std::string corrected = correct_with(text, *index);
      if (corrected != text) ++tally.corrected_count;
      text = std::move(corrected);
    }
    if (word_count(text) < config_.min_words) {
      ++tally.removed_short;
      continue;
    }
    if (config_.dedup && !seen.insert(text).second) {
      ++tally.removed_duplicate;
      continue;
    }
    Review kept = review;
    kept.text = std::move(text);
    out.reviews.push_back(std::move(kept));
  }
  tally.output_count = out.size();
  if (report) *report = tally;
  return out;
}

PreprocessResult preprocess_dataset(const LabeledDataset& dataset, const PreprocessConfig& config) {
  PreprocessResult result;
  result.dataset = Preprocessor(config).run(dataset, &result.report);
  return result;
}

}  // namespace a11yrev
