#include "a11yrev/crawler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "a11yrev/error.hpp"
#include "a11yrev/html.hpp"
#include "httplib.h"
#include "json.hpp"

namespace a11yrev {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

struct UrlParts {
  std::string origin;  // scheme://host[:port], lowercased
  std::string path;    // path plus query, always starting with '/'
};

std::optional<UrlParts> split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
  const auto authority_start = scheme_end + 3;
  auto path_start = url.find_first_of("/?#", authority_start);
  if (path_start == std::string_view::npos) path_start = url.size();
  if (path_start == authority_start) return std::nullopt;
  UrlParts parts;
  parts.origin = lower(url.substr(0, path_start));
  std::string_view rest = url.substr(path_start);
  if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  parts.path = rest.empty() || rest.front() != '/' ? "/" + std::string(rest) : std::string(rest);
  return parts;
}

// Product token of a User-Agent string: "MyBot/2.1 (+url)" -> "mybot".
std::string product_token(std::string_view user_agent) {
  const std::string trimmed = trim(user_agent);
  const auto end = trimmed.find_first_of("/ \t");
  return lower(trimmed.substr(0, end));
}

}  // namespace

void CrawlConfig::validate() const {
  if (seed_urls.empty()) fail(ErrorCode::InvalidArgument, "crawl: no seed URLs");
  if (trim(review_selector).empty() || trim(item_selector).empty()) {
    fail(ErrorCode::InvalidArgument, "crawl: selectors must be non-empty");
  }
  if (max_pages < 1) fail(ErrorCode::InvalidArgument, "crawl: max_pages must be at least 1");
  if (trim(user_agent).empty()) fail(ErrorCode::InvalidArgument, "crawl: user agent must be non-empty");
}

RobotsRules parse_robots(std::string_view robots_text, std::string_view user_agent) {
  RobotsRules result;
  std::istringstream stream{std::string(robots_text)};
  std::string line;
  bool collecting_agents = false;
  while (std::getline(stream, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = lower(trim(std::string_view(line).substr(0, colon)));
    const std::string value = trim(std::string_view(line).substr(colon + 1));
    if (key == "user-agent") {
      if (!collecting_agents) result.groups.emplace_back();
      collecting_agents = true;
      if (!value.empty()) result.groups.back().agents.push_back(lower(value));
      continue;
    }
    if (result.groups.empty()) continue;  // rules before any group
    collecting_agents = false;
    RobotsGroup& group = result.groups.back();
    if (key == "allow" || key == "disallow") {
      if (value.empty() || value.front() != '/') continue;
      group.rules.push_back({value, key == "allow"});
    } else if (key == "crawl-delay") {
      char* end = nullptr;
      const double seconds = std::strtod(value.c_str(), &end);
      if (end != value.c_str() && *end == '\0' && std::isfinite(seconds) && seconds >= 0.0) {
        group.crawl_delay_seconds = seconds;
      }
    }
  }

  const std::string token = product_token(user_agent);
  // Specificity: length of the matching agent pattern, "*" = 0.
  long best = -1;
  for (const auto& group : result.groups) {
    for (const auto& agent : group.agents) {
      long score = -1;
      if (agent == "*") {
        score = 0;
      } else if (!token.empty() && token.starts_with(agent)) {
        score = static_cast<long>(agent.size());
      }
      best = std::max(best, score);
    }
  }
  if (best < 0) return result;
  for (const auto& group : result.groups) {
    const bool selected = std::any_of(group.agents.begin(), group.agents.end(), [&](const std::string& agent) {
      return best == 0 ? agent == "*" : agent != "*" && token.starts_with(agent) && static_cast<long>(agent.size()) == best;
    });
    if (!selected) continue;
    result.rules.insert(result.rules.end(), group.rules.begin(), group.rules.end());
    if (group.crawl_delay_seconds) {
      result.crawl_delay_seconds = std::max(result.crawl_delay_seconds.value_or(0.0), *group.crawl_delay_seconds);
    }
  }
  return result;
}

bool is_allowed(const RobotsRules& rules, std::string_view path) {
  if (path.empty() || path.front() != '/') {
    fail(ErrorCode::InvalidArgument, "robots: path '" + std::string(path) + "' must start with '/'");
  }
  if (path == "/robots.txt") return true;
  const RobotsRule* best = nullptr;
  for (const auto& rule : rules.rules) {
    if (!path.starts_with(rule.prefix)) continue;
    if (!best || rule.prefix.size() > best->prefix.size() ||
        (rule.prefix.size() == best->prefix.size() && rule.allow)) {
      best = &rule;
    }
  }
  return !best || best->allow;
}

Extraction extract_reviews(std::string_view html, const CrawlConfig& config, std::string_view url,
                           std::chrono::system_clock::time_point fetched_at) {
  if (html.empty()) fail(ErrorCode::InvalidArgument, "extract_reviews: empty page");
  const auto doc = html::Document::parse(html);
  const auto containers = html::Selector::parse(config.review_selector).select(doc, doc.root());
  const auto item_selector = html::Selector::parse(config.item_selector);

  std::string app_name;
  if (!trim(config.app_selector).empty()) {
    const auto heads = html::Selector::parse(config.app_selector).select(doc, doc.root());
    if (!heads.empty()) app_name = doc.text_content(heads.front());
  }
  if (app_name.empty()) {
    const auto titles = html::Selector::parse("title").select(doc, doc.root());
    if (!titles.empty()) app_name = doc.text_content(titles.front());
  }

  Extraction out;
  out.containers_matched = containers.size();
  std::unordered_set<std::size_t> seen;
  for (std::size_t container : containers) {
    for (std::size_t item : item_selector.select(doc, container)) {
      if (!seen.insert(item).second) continue;
      std::string text = doc.text_content(item);
      if (text.empty()) {
        ++out.items_dropped;
        continue;
      }
      out.records.push_back({std::string(url), app_name, std::move(text), fetched_at});
    }
  }
  return out;
}

CrawlEnvironment default_crawl_environment(const std::string& user_agent) {
  CrawlEnvironment env;
  env.fetch = [user_agent](const std::string& url) -> std::string {
    const auto parts = split_url(url);
    if (!parts) throw FetchError("malformed URL '" + url + "'");
    httplib::Client client(parts->origin);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(60);
    auto response = client.Get(parts->path, httplib::Headers{{"User-Agent", user_agent}});
    if (!response) throw FetchError(url + ": " + httplib::to_string(response.error()));
    if (response->status < 200 || response->status >= 300) {
      throw FetchError(url + ": HTTP " + std::to_string(response->status));
    }
    return response->body;
  };
  env.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  env.now = [] { return std::chrono::system_clock::now(); };
  return env;
}

CrawlResult crawl(const CrawlConfig& config, const CrawlEnvironment& env) {
  config.validate();
  if (!env.fetch) fail(ErrorCode::InvalidArgument, "crawl: no fetcher supplied");
  // Fail on bad selectors before any request goes out.
  html::Selector::parse(config.review_selector);
  html::Selector::parse(config.item_selector);

  struct HostState {
    RobotsRules robots;
    bool contacted = false;
  };
  std::map<std::string, HostState> hosts;
  CrawlResult result;
  std::size_t failures = 0;

  auto now = [&] { return env.now ? env.now() : std::chrono::system_clock::now(); };
  auto polite_fetch = [&](HostState& host, const std::string& url) {
    if (host.contacted) {
      double delay_ms = config.delay_ms;
      if (host.robots.crawl_delay_seconds) delay_ms = std::max(delay_ms, *host.robots.crawl_delay_seconds * 1000.0);
      if (delay_ms > 0 && env.sleep) env.sleep(std::chrono::milliseconds(static_cast<long long>(std::ceil(delay_ms))));
    }
    host.contacted = true;
    return env.fetch(url);
  };

  for (const std::string& url : config.seed_urls) {
    if (result.pages_fetched >= config.max_pages) {
      result.diagnostics.push_back("max_pages reached; skipping remaining seeds from " + url);
      break;
    }
    const auto parts = split_url(url);
    if (!parts) {
      result.diagnostics.push_back("malformed URL skipped: " + url);
      continue;
    }
    auto [it, inserted] = hosts.try_emplace(parts->origin);
    HostState& host = it->second;
    if (inserted) {
      try {
        host.robots = parse_robots(polite_fetch(host, parts->origin + "/robots.txt"), config.user_agent);
      } catch (const std::exception& e) {
        result.diagnostics.push_back("robots.txt unavailable for " + parts->origin + " (" + e.what() +
                                     "); treating as allow-all");
      }
    }
    if (!is_allowed(host.robots, parts->path)) {
      result.diagnostics.push_back("blocked by robots: " + url);
      continue;
    }
    ++result.pages_fetched;
    std::string page;
    try {
      page = polite_fetch(host, url);
    } catch (const std::exception& e) {
      ++failures;
      result.diagnostics.push_back("fetch failed: " + url + " (" + e.what() + ")");
      continue;
    }
    if (page.empty()) {
      result.diagnostics.push_back("empty page: " + url);
      continue;
    }
    auto extraction = extract_reviews(page, config, url, now());
    if (extraction.containers_matched == 0) {
      result.diagnostics.push_back("no review containers matched on " + url);
    }
    for (auto& record : extraction.records) result.records.push_back(std::move(record));
  }
  if (result.pages_fetched > 0 && failures == result.pages_fetched) {
    fail(ErrorCode::Io, "crawl: all " + std::to_string(failures) + " page fetches failed");
  }
  return result;
}

std::string format_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t seconds = std::chrono::system_clock::to_time_t(
      std::chrono::time_point_cast<std::chrono::seconds>(t));
  std::tm utc{};
  gmtime_r(&seconds, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

std::chrono::system_clock::time_point parse_timestamp(std::string_view text) {
  std::tm utc{};
  std::istringstream in{std::string(text)};
  in >> std::get_time(&utc, "%Y-%m-%dT%H:%M:%S");
  if (in.fail() || in.get() != 'Z') fail(ErrorCode::Format, "bad ISO-8601 UTC timestamp '" + std::string(text) + "'");
  return std::chrono::system_clock::from_time_t(timegm(&utc));
}

std::string serialize_raw_records(const std::vector<RawReviewRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json object;
    object["url"] = r.url;
    object["app_name"] = r.app_name;
    object["text"] = r.text;
    object["fetched_at"] = format_timestamp(r.fetched_at);
    out += object.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<RawReviewRecord> parse_raw_records(const std::string& content) {
  std::vector<RawReviewRecord> records;
  std::istringstream stream(content);
  std::string line;
  std::size_t record = 0;
  while (std::getline(stream, line)) {
    if (trim(line).empty()) continue;
    ++record;
    try {
      const auto object = nlohmann::json::parse(line);
      RawReviewRecord r;
      r.url = object.value("url", "");
      r.app_name = object.value("app_name", "");
      r.text = object.at("text").get<std::string>();
      r.fetched_at = parse_timestamp(object.at("fetched_at").get<std::string>());
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Format, "record " + std::to_string(record) + ": " + e.what());
    }
  }
  return records;
}

void save_raw_records(const std::vector<RawReviewRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << serialize_raw_records(records);
  if (!out.flush()) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

LabeledDataset to_dataset(const std::vector<RawReviewRecord>& records) {
  LabeledDataset dataset;
  dataset.provenance = "crawl";
  for (std::size_t i = 0; i < records.size(); ++i) {
    Review review;
    review.id = std::to_string(i);
    review.source = ReviewSource::Crawled;
    review.app_name = records[i].app_name;
    review.raw_text = records[i].text;
    review.text = records[i].text;
    dataset.reviews.push_back(std::move(review));
  }
  return dataset;
}

}  // namespace a11yrev
