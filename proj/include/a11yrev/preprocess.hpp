#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "a11yrev/corpus.hpp"

namespace a11yrev {

// Lowercases, maps every Unicode punctuation (P*) and symbol (S*) code point
// to a space, collapses whitespace runs and trims. Ill-formed UTF-8 bytes are
// treated as U+FFFD, which is a symbol and therefore becomes a space.
std::string normalize(std::string_view text);

// Tokens of normalize(text).
std::vector<std::string> tokenize(std::string_view text);

std::size_t word_count(std::string_view text);

using Lexicon = std::unordered_set<std::string>;

// One lowercase word per line, '#' starts a comment line.
Lexicon load_lexicon(const std::filesystem::path& path);

// Replaces each out-of-lexicon token by the single lexicon word at
// Levenshtein distance 1, if exactly one exists. Tokens are split on ASCII
// whitespace and the separators are preserved.
std::string correct_spelling(std::string_view text, const Lexicon& lexicon);

enum class SpellCorrection { Off, Lexicon };

struct PreprocessConfig {
  std::size_t min_words = 5;
  SpellCorrection spell_correction = SpellCorrection::Off;
  std::optional<std::filesystem::path> lexicon_path;
  bool dedup = true;

  void validate() const;
};

struct PreprocessReport {
  std::size_t input_count = 0;
  std::size_t corrected_count = 0;
  std::size_t removed_short = 0;
  std::size_t removed_duplicate = 0;
  std::size_t output_count = 0;

  bool operator==(const PreprocessReport&) const = default;
};

std::string to_json(const PreprocessReport& report);

// Holds a validated config and its loaded lexicon.
class Preprocessor {
 public:
  explicit Preprocessor(PreprocessConfig config);

  const PreprocessConfig& config() const noexcept { return config_; }

  // Normalized (and, when enabled, spell-corrected) form of one review.
  std::string clean(std::string_view raw_text) const;

  // Stages: spell-correct, normalize, short filter, dedup on normalized text
  // keeping the first occurrence. Always restarts from raw_text, so running
  // it on its own output is a no-op.
  LabeledDataset run(const LabeledDataset& dataset, PreprocessReport* report = nullptr) const;

 private:
  PreprocessConfig config_;
  Lexicon lexicon_;
};

struct PreprocessResult {
  LabeledDataset dataset;
  PreprocessReport report;
};

PreprocessResult preprocess_dataset(const LabeledDataset& dataset, const PreprocessConfig& config);

}  // namespace a11yrev
