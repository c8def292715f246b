#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace a11yrev {

enum class ReviewSource { Crawled, Imported };

const char* to_string(ReviewSource source) noexcept;

// Labels: 0 = no accessibility issue (includes developer-side problems),
// 1 = the review reports an issue that makes the app or a feature
// inaccessible to its users (UI, navigation, customization, usability).
struct Review {
  std::string id;
  ReviewSource source = ReviewSource::Imported;
  std::string app_name;
  std::string raw_text;
  std::string text;
  std::optional<int> label;

  bool operator==(const Review&) const = default;
};

struct LabeledDataset {
  std::vector<Review> reviews;
  std::string provenance;

  std::size_t size() const noexcept { return reviews.size(); }
  bool empty() const noexcept { return reviews.empty(); }
  bool fully_labeled() const noexcept;

  bool operator==(const LabeledDataset&) const = default;
};

struct ClassBalance {
  std::size_t total = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;

  bool operator==(const ClassBalance&) const = default;
};

enum class DatasetFormat { DelimitedTable, LineRecords };

// Picks LineRecords for .jsonl/.ndjson/.json, DelimitedTable otherwise.
DatasetFormat format_for_path(const std::filesystem::path& path);

// Throws Error(Io) for unreadable files and Error(Format) naming the 1-based
// record number for malformed records or labels outside {0,1}.
LabeledDataset load_reviews(const std::filesystem::path& path, DatasetFormat format);
LabeledDataset parse_reviews(const std::string& content, DatasetFormat format);

void save_reviews(const LabeledDataset& dataset, const std::filesystem::path& path,
                  DatasetFormat format);
std::string serialize_reviews(const LabeledDataset& dataset, DatasetFormat format);

struct Split {
  LabeledDataset train_val;
  LabeledDataset test;
};

// Per-class sampling: the test set receives round(test_count * P / N)
// positives (clamped to what is available) and the rest negatives. Both
// partitions keep the input order.
Split stratified_split(const LabeledDataset& dataset, std::size_t test_count, std::uint64_t seed);

ClassBalance class_balance(const LabeledDataset& dataset);

// Default test size; matches the reported 716-review test partition.
inline constexpr std::size_t kDefaultTestCount = 716;

}  // namespace a11yrev
