#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "a11yrev/corpus.hpp"

namespace a11yrev {

struct CrawlConfig {
  std::vector<std::string> seed_urls;
  std::string review_selector;
  std::string item_selector = "li";
  // Text of the first match names the app; falls back to <title>.
  std::string app_selector = "h1";
  std::uint32_t delay_ms = 1000;
  std::string user_agent = "a11yrev-crawler/1.0";
  std::size_t max_pages = 100;

  void validate() const;
};

struct RobotsRule {
  std::string prefix;
  bool allow = false;

  bool operator==(const RobotsRule&) const = default;
};

struct RobotsGroup {
  std::vector<std::string> agents;  // lowercase
  std::vector<RobotsRule> rules;
  std::optional<double> crawl_delay_seconds;
};

// All parsed groups plus the rules that apply to the requesting agent.
struct RobotsRules {
  std::vector<RobotsGroup> groups;
  std::vector<RobotsRule> rules;
  std::optional<double> crawl_delay_seconds;

  bool allows_everything() const noexcept { return rules.empty(); }
};

// Supports User-agent groups, Allow, Disallow and Crawl-delay. The group
// whose agent token is the longest prefix of the requesting product token
// wins, "*" last; equal groups are merged. Malformed lines are skipped.
RobotsRules parse_robots(std::string_view robots_text, std::string_view user_agent);

// Longest matching prefix decides; allow wins a tie; no match allows.
bool is_allowed(const RobotsRules& rules, std::string_view path);

struct RawReviewRecord {
  std::string url;
  std::string app_name;
  std::string text;
  std::chrono::system_clock::time_point fetched_at;

  bool operator==(const RawReviewRecord&) const = default;
};

struct Extraction {
  std::vector<RawReviewRecord> records;
  std::size_t containers_matched = 0;
  std::size_t items_dropped = 0;
};

// One record per non-blank item under each container (each item counted
// once even when containers nest).
Extraction extract_reviews(std::string_view html, const CrawlConfig& config, std::string_view url = {},
                           std::chrono::system_clock::time_point fetched_at = {});

// Thrown by fetchers; the crawler records it and moves on.
class FetchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Fetcher = std::function<std::string(const std::string& url)>;

struct CrawlEnvironment {
  Fetcher fetch;
  std::function<void(std::chrono::milliseconds)> sleep;
  std::function<std::chrono::system_clock::time_point()> now;
};

// Real network fetching via HTTP(S) GET, thread sleeps and the system clock.
CrawlEnvironment default_crawl_environment(const std::string& user_agent);

struct CrawlResult {
  std::vector<RawReviewRecord> records;
  std::vector<std::string> diagnostics;
  std::size_t pages_fetched = 0;
};

// Fetches each host's robots.txt before its first page, skips disallowed
// URLs, waits max(delay_ms, Crawl-delay) between requests to the same host,
// and stops after max_pages page fetches. Throws Io when every attempted page
// fetch failed.
CrawlResult crawl(const CrawlConfig& config, const CrawlEnvironment& env);

std::string format_timestamp(std::chrono::system_clock::time_point t);
std::chrono::system_clock::time_point parse_timestamp(std::string_view text);

// LINE_RECORDS with keys url, app_name, text, fetched_at.
std::string serialize_raw_records(const std::vector<RawReviewRecord>& records);
std::vector<RawReviewRecord> parse_raw_records(const std::string& content);
void save_raw_records(const std::vector<RawReviewRecord>& records, const std::filesystem::path& path);

LabeledDataset to_dataset(const std::vector<RawReviewRecord>& records);

}  // namespace a11yrev
