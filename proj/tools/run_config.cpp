#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

#include "CLI11.hpp"

namespace a11yrev::cli {
namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw UsageError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string lower = CLI::detail::to_lower(text);
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  throw UsageError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::vector<std::string>& inputs)>;

std::string single(const std::string& key, const std::vector<std::string>& inputs) {
  if (inputs.size() != 1) throw UsageError("config key '" + key + "' takes exactly one value");
  return inputs.front();
}

template <typename T>
Setter number(T RunConfig::*field) {
  return [field](RunConfig& c, const std::string& key, const std::vector<std::string>& in) {
    c.*field = parse_number<T>(key, single(key, in));
  };
}

Setter text(std::string RunConfig::*field) {
  return [field](RunConfig& c, const std::string& key, const std::vector<std::string>& in) {
    c.*field = single(key, in);
  };
}

Setter flag(bool RunConfig::*field) {
  return [field](RunConfig& c, const std::string& key, const std::vector<std::string>& in) {
    c.*field = parse_bool(key, single(key, in));
  };
}

Setter list(std::vector<std::string> RunConfig::*field) {
  return [field](RunConfig& c, const std::string&, const std::vector<std::string>& in) {
    std::vector<std::string> values;
    for (const auto& item : in) {
      for (auto& part : CLI::detail::split(item, ',')) {
        part = CLI::detail::trim_copy(part);
        if (!part.empty()) values.push_back(part);
      }
    }
    c.*field = std::move(values);
  };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table{
      {"global.seed", number(&RunConfig::seed)},
      {"global.embedder", text(&RunConfig::embedder)},
      {"preprocess.min_words", number(&RunConfig::min_words)},
      {"preprocess.spell_correction", text(&RunConfig::spell_correction)},
      {"preprocess.lexicon", text(&RunConfig::lexicon)},
      {"preprocess.dedup", flag(&RunConfig::dedup)},
      {"split.test_count", number(&RunConfig::test_count)},
      {"train.epochs", number(&RunConfig::epochs)},
      {"train.learning_rate", number(&RunConfig::learning_rate)},
      {"train.batch_size", number(&RunConfig::batch_size)},
      {"train.val_fraction", number(&RunConfig::val_fraction)},
      {"hybrid.confidence_threshold", number(&RunConfig::confidence_threshold)},
      {"hybrid.keywords", text(&RunConfig::keywords)},
      {"keywords.max_n", number(&RunConfig::max_n)},
      {"keywords.top_k", number(&RunConfig::top_k)},
      {"crawl.seeds", list(&RunConfig::seeds)},
      {"crawl.selector", text(&RunConfig::selector)},
      {"crawl.item_selector", text(&RunConfig::item_selector)},
      {"crawl.app_selector", text(&RunConfig::app_selector)},
      {"crawl.delay_ms", number(&RunConfig::delay_ms)},
      {"crawl.max_pages", number(&RunConfig::max_pages)},
      {"crawl.user_agent", text(&RunConfig::user_agent)},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (embedder.empty()) throw UsageError("embedder must not be empty");
  if (spell_correction != "off" && spell_correction != "lexicon") {
    throw UsageError("spell_correction must be 'off' or 'lexicon'");
  }
  if (spell_correction == "lexicon" && lexicon.empty()) {
    throw UsageError("spell_correction = lexicon needs a lexicon path");
  }
  if (test_count == 0) throw UsageError("test_count must be positive");
  if (epochs == 0) throw UsageError("epochs must be positive");
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (batch_size == 0) throw UsageError("batch_size must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw UsageError("val_fraction must lie in [0, 1)");
  if (!(confidence_threshold > 0.5 && confidence_threshold <= 1.0)) {
    throw UsageError("confidence_threshold must lie in (0.5, 1]");
  }
  if (max_n == 0) throw UsageError("max_n must be positive");
  if (max_pages == 0) throw UsageError("max_pages must be positive");
}

void apply_config_text(RunConfig& config, const std::string& text, const std::string& origin) {
  std::istringstream stream(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(stream);
  } catch (const CLI::ParseError& e) {
    throw UsageError(origin + ": " + e.what());
  }
  for (const auto& item : items) {
    // Section open/close markers emitted by the parser.
    if (item.name == "++" || item.name == "--") continue;
    std::string key = item.fullname();
    if (item.parents.empty()) key = "global." + item.name;
    if (key.rfind("default.", 0) == 0) key = "global." + key.substr(8);
    bool known = false;
    for (const auto& [name, setter] : setters()) {
      if (name == key) {
        setter(config, key, item.inputs);
        known = true;
        break;
      }
    }
    if (!known) throw UsageError(origin + ": unknown config key '" + key + "'");
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  apply_config_text(config, buffer.str(), path);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& entry : setters()) keys.push_back(entry.first);
  return keys;
}

}  // namespace a11yrev::cli
