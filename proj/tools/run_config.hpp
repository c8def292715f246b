#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace a11yrev::cli {

// Bad flags or config files; the CLI maps these to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every tunable of the pipeline in one place. Sections of the config file
// map onto the field name prefixes below.
struct RunConfig {
  // [global]
  std::uint64_t seed = 0;
  std::string embedder = "hash";

  // [preprocess]
  std::size_t min_words = 5;
  std::string spell_correction = "off";  // off | lexicon
  std::string lexicon;
  bool dedup = true;

  // [split]
  std::size_t test_count = 716;

  // [train]
  std::size_t epochs = 3;
  double learning_rate = 0.005;
  std::size_t batch_size = 32;
  double val_fraction = 0.1;

  // [hybrid]
  double confidence_threshold = 0.80;
  std::string keywords;

  // [keywords]
  std::size_t max_n = 3;
  std::size_t top_k = 50;

  // [crawl]
  std::vector<std::string> seeds;
  std::string selector;
  std::string item_selector = "li";
  std::string app_selector = "h1";
  std::uint32_t delay_ms = 1000;
  std::size_t max_pages = 100;
  std::string user_agent = "a11yrev-crawler/1.0";

  void validate() const;
};

// Applies "key = value" lines grouped under [section] headers (TOML subset,
// "#" comments, arrays as [a, b]).
// Keys outside the known set raise UsageError.
void apply_config_text(RunConfig& config, const std::string& text, const std::string& origin = "<config>");
void apply_config_file(RunConfig& config, const std::string& path);

// Known keys as "section.key", in declaration order.
std::vector<std::string> config_keys();

}  // namespace a11yrev::cli
