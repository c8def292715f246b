#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "a11yrev/a11yrev.h"
#include "json.hpp"
#include "run_config.hpp"

namespace a11yrev::cli {
namespace {

// Failures reported by the library: bad data, missing artifacts, providers.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(a11y_status status) {
  if (status != A11Y_OK) throw DomainError(a11y_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Dataset = std::unique_ptr<a11y_dataset, Deleter<a11y_dataset, a11y_dataset_free>>;
using Embedder = std::unique_ptr<a11y_embedder, Deleter<a11y_embedder, a11y_embedder_free>>;
using Features = std::unique_ptr<a11y_features, Deleter<a11y_features, a11y_features_free>>;
using Model = std::unique_ptr<a11y_model, Deleter<a11y_model, a11y_model_free>>;
using Keywords = std::unique_ptr<a11y_keywords, Deleter<a11y_keywords, a11y_keywords_free>>;
using Predictions = std::unique_ptr<a11y_predictions, Deleter<a11y_predictions, a11y_predictions_free>>;
using CString = std::unique_ptr<char, Deleter<char, a11y_string_free>>;

std::string take(char* raw) { return CString(raw).get(); }

// Collects flag values and replays only the flags actually given on top of
// the file-derived configuration.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T RunConfig::*field, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* option = app->add_option(flag, *value, help);
    appliers_.push_back([option, value, field](RunConfig& c) {
      if (option->count() > 0) c.*field = *value;
    });
    return option;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& flag, bool RunConfig::*field, bool when_given,
                        const std::string& help) {
    CLI::Option* option = app->add_flag(flag, help);
    appliers_.push_back([option, field, when_given](RunConfig& c) {
      if (option->count() > 0) c.*field = when_given;
    });
    return option;
  }

  void apply(RunConfig& config) const {
    for (const auto& apply : appliers_) apply(config);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> appliers_;
};

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DomainError("cannot write '" + path + "'");
  file << text;
  if (!file.flush()) throw DomainError("write failed for '" + path + "'");
}

a11y_format dataset_format(const std::string& path, const std::string& requested) {
  if (requested == "csv") return A11Y_FORMAT_DELIMITED_TABLE;
  if (requested == "jsonl") return A11Y_FORMAT_LINE_RECORDS;
  if (path == "-") return A11Y_FORMAT_LINE_RECORDS;
  return a11y_format_for_path(path.c_str());
}

Dataset load_dataset(const std::string& path) {
  a11y_dataset* raw = nullptr;
  check(a11y_dataset_load(path.c_str(), a11y_format_for_path(path.c_str()), &raw));
  return Dataset(raw);
}

void write_dataset(const a11y_dataset* dataset, const std::string& path, const std::string& format,
                   std::ostream& out) {
  const a11y_format f = dataset_format(path, format);
  if (path == "-") {
    char* text = nullptr;
    check(a11y_dataset_serialize(dataset, f, &text));
    write_output(path, take(text), out);
  } else {
    check(a11y_dataset_save(dataset, path.c_str(), f));
  }
}

a11y_preprocess_config preprocess_config(const RunConfig& c) {
  a11y_preprocess_config config;
  a11y_preprocess_config_init(&config);
  config.min_words = c.min_words;
  config.spell_correction = c.spell_correction == "lexicon" ? 1 : 0;
  config.lexicon_path = c.lexicon.empty() ? nullptr : c.lexicon.c_str();
  config.dedup = c.dedup ? 1 : 0;
  return config;
}

Features features_for(const RunConfig& c, const a11y_dataset* dataset, const std::string& cache_path) {
  a11y_features* raw = nullptr;
  if (!cache_path.empty()) {
    check(a11y_features_load_cache(cache_path.c_str(), dataset, &raw));
    return Features(raw);
  }
  a11y_embedder* embedder_raw = nullptr;
  check(a11y_embedder_create(c.embedder.c_str(), c.seed, &embedder_raw));
  Embedder embedder(embedder_raw);
  const a11y_preprocess_config pre = preprocess_config(c);
  check(a11y_features_compute(embedder.get(), dataset, &pre, &raw));
  return Features(raw);
}

Model load_model(const std::string& path) {
  a11y_model* raw = nullptr;
  check(a11y_model_load(path.c_str(), &raw));
  return Model(raw);
}

Keywords load_keywords(const std::string& dir) {
  a11y_keywords* raw = nullptr;
  check(a11y_keywords_load(dir.c_str(), &raw));
  return Keywords(raw);
}

void require_matching_dims(const a11y_model* model, const a11y_features* features) {
  const size_t expected = a11y_model_input_dim(model);
  const size_t actual = a11y_features_dim(features);
  if (expected != actual) {
    throw DomainError("model expects " + std::to_string(expected) + "-dimensional features but the embedder produces " +
                      std::to_string(actual));
  }
}

a11y_variant parse_variant(const std::string& name) {
  if (name == "hybrid") return A11Y_VARIANT_HYBRID;
  if (name == "no-keywords") return A11Y_VARIANT_NO_KEYWORDS;
  if (name == "model-only") return A11Y_VARIANT_MODEL_ONLY;
  throw UsageError("unknown variant '" + name + "'");
}

Predictions predict(const RunConfig& c, const a11y_features* features, const a11y_dataset* dataset,
                    const a11y_model* model, const a11y_keywords* keywords, a11y_variant variant) {
  a11y_hybrid_config hybrid;
  a11y_hybrid_config_init(&hybrid);
  hybrid.confidence_threshold = c.confidence_threshold;
  hybrid.keywords_enabled = variant == A11Y_VARIANT_HYBRID ? 1 : 0;
  const a11y_preprocess_config pre = preprocess_config(c);
  a11y_predictions* raw = nullptr;
  check(a11y_predict_dataset(features, dataset, model, keywords, &pre, &hybrid, variant, &raw));
  return Predictions(raw);
}

struct CrawlArgs {
  std::string out;
};

int do_crawl(const RunConfig& c, const CrawlArgs& a, std::ostream& err) {
  if (c.seeds.empty()) throw UsageError("crawl needs at least one seed URL (--seeds)");
  if (c.selector.empty()) throw UsageError("crawl needs a review container selector (--selector)");
  std::vector<const char*> seeds;
  for (const auto& s : c.seeds) seeds.push_back(s.c_str());
  a11y_crawl_config config{};
  config.seed_urls = seeds.data();
  config.seed_count = seeds.size();
  config.review_selector = c.selector.c_str();
  config.item_selector = c.item_selector.c_str();
  config.app_selector = c.app_selector.c_str();
  config.delay_ms = c.delay_ms;
  config.user_agent = c.user_agent.c_str();
  config.max_pages = c.max_pages;
  a11y_crawl_summary summary{};
  char* diagnostics = nullptr;
  check(a11y_crawl(&config, nullptr, nullptr, a.out.c_str(), &summary, &diagnostics));
  err << take(diagnostics);
  err << "crawl: " << summary.records << " records from " << summary.pages_fetched << " pages\n";
  return kExitOk;
}

struct PreprocessArgs {
  std::string in;
  std::string out = "-";
  std::string format = "auto";
  std::string report;
};

int do_preprocess(const RunConfig& c, const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
  Dataset input = load_dataset(a.in);
  const a11y_preprocess_config pre = preprocess_config(c);
  a11y_dataset* raw = nullptr;
  a11y_preprocess_report report{};
  check(a11y_preprocess(input.get(), &pre, &raw, &report));
  Dataset cleaned(raw);
  write_dataset(cleaned.get(), a.out, a.format, out);
  char* json = nullptr;
  check(a11y_preprocess_report_json(&report, &json));
  const std::string text = take(json) + "\n";
  if (a.report.empty()) {
    err << text;
  } else {
    write_output(a.report, text, out);
  }
  return kExitOk;
}

struct SplitArgs {
  std::string in;
  std::string train_out;
  std::string test_out;
  std::string format = "auto";
};

int do_split(const RunConfig& c, const SplitArgs& a, std::ostream& out, std::ostream& err) {
  Dataset input = load_dataset(a.in);
  a11y_dataset* train_raw = nullptr;
  a11y_dataset* test_raw = nullptr;
  check(a11y_dataset_split(input.get(), c.test_count, c.seed, &train_raw, &test_raw));
  Dataset train(train_raw);
  Dataset test(test_raw);
  write_dataset(train.get(), a.train_out, a.format, out);
  write_dataset(test.get(), a.test_out, a.format, out);
  for (const auto& [name, ds] : {std::pair{"train_val", train.get()}, std::pair{"test", test.get()}}) {
    a11y_class_balance b{};
    check(a11y_dataset_class_balance(ds, &b));
    err << "split: " << name << " " << b.total << " reviews (" << b.positives << " positive, " << b.negatives
        << " negative)\n";
  }
  return kExitOk;
}

struct EmbedArgs {
  std::string data;
  std::string out;
};

int do_embed(const RunConfig& c, const EmbedArgs& a, std::ostream& err) {
  Dataset data = load_dataset(a.data);
  Features features = features_for(c, data.get(), "");
  check(a11y_features_save_cache(features.get(), a.out.c_str()));
  err << "embed: " << a11y_features_rows(features.get()) << " vectors of dimension "
      << a11y_features_dim(features.get()) << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string out;
  std::string embeddings;
};

int do_train(const RunConfig& c, const TrainArgs& a, std::ostream& err) {
  Dataset data = load_dataset(a.data);
  Features features = features_for(c, data.get(), a.embeddings);
  a11y_train_config config;
  a11y_train_config_init(&config);
  config.epochs = c.epochs;
  config.learning_rate = c.learning_rate;
  config.batch_size = c.batch_size;
  config.val_fraction = c.val_fraction;
  config.seed = c.seed;
  std::vector<a11y_epoch_stats> history(c.epochs);
  a11y_model* raw = nullptr;
  check(a11y_model_train(features.get(), data.get(), &config, &raw, history.data()));
  Model model(raw);
  check(a11y_model_save(model.get(), a.out.c_str()));
  for (size_t e = 0; e < history.size(); ++e) {
    err << "epoch " << (e + 1) << ": train_loss " << history[e].train_loss;
    if (history[e].val_accuracy >= 0.0) err << " val_accuracy " << history[e].val_accuracy;
    err << "\n";
  }
  return kExitOk;
}

struct ExtractArgs {
  std::string data;
  std::string out = "-";
};

int do_extract(const RunConfig& c, const ExtractArgs& a, std::ostream& out) {
  Dataset data = load_dataset(a.data);
  char* json = nullptr;
  check(a11y_keywords_extract(data.get(), c.max_n, c.top_k, &json));
  const auto parsed = nlohmann::ordered_json::parse(take(json));
  write_output(a.out, parsed.dump(2) + "\n", out);
  return kExitOk;
}

struct PredictArgs {
  std::string data;
  std::string model;
  std::string variant = "hybrid";
  std::string embeddings;
  std::string out = "-";
};

int do_predict(const RunConfig& c, const PredictArgs& a, std::ostream& out) {
  const a11y_variant variant = parse_variant(a.variant);
  if (variant == A11Y_VARIANT_HYBRID && c.keywords.empty()) {
    throw UsageError("variant hybrid needs a keyword directory (--keywords)");
  }
  Model model = load_model(a.model);
  Keywords keywords = variant == A11Y_VARIANT_HYBRID ? load_keywords(c.keywords) : Keywords();
  Dataset data = load_dataset(a.data);
  Features features = features_for(c, data.get(), a.embeddings);
  require_matching_dims(model.get(), features.get());
  Predictions predictions = predict(c, features.get(), data.get(), model.get(), keywords.get(), variant);
  char* jsonl = nullptr;
  check(a11y_predictions_to_jsonl(predictions.get(), &jsonl));
  write_output(a.out, take(jsonl), out);
  return kExitOk;
}

struct EvaluateArgs {
  std::string test;
  std::string model;
  std::string variant = "both";
  std::string embeddings;
  std::string format = "json";
  std::string predictions_out;
  std::string out = "-";
};

int do_evaluate(const RunConfig& c, const EvaluateArgs& a, std::ostream& out) {
  const bool both = a.variant == "both";
  const a11y_variant variant = both ? A11Y_VARIANT_HYBRID : parse_variant(a.variant);
  if (variant == A11Y_VARIANT_HYBRID && c.keywords.empty()) {
    throw UsageError("variant " + a.variant + " needs a keyword directory (--keywords)");
  }
  if (both && !a.predictions_out.empty()) {
    throw UsageError("--predictions-out needs a single variant");
  }
  Model model = load_model(a.model);
  Keywords keywords = variant == A11Y_VARIANT_HYBRID ? load_keywords(c.keywords) : Keywords();
  Dataset test = load_dataset(a.test);
  Features features = features_for(c, test.get(), a.embeddings);
  require_matching_dims(model.get(), features.get());

  auto score = [&](a11y_variant v) {
    Predictions predictions = predict(c, features.get(), test.get(), model.get(), keywords.get(), v);
    if (!a.predictions_out.empty()) check(a11y_predictions_save(predictions.get(), a.predictions_out.c_str()));
    a11y_metrics metrics{};
    check(a11y_predictions_score(predictions.get(), test.get(), &metrics));
    return metrics;
  };

  std::string report;
  if (both) {
    const a11y_metrics hybrid = score(A11Y_VARIANT_HYBRID);
    const a11y_metrics no_keywords = score(A11Y_VARIANT_NO_KEYWORDS);
    char* json = nullptr;
    char* table = nullptr;
    check(a11y_ablation_report(&hybrid, &no_keywords, &json, a.format == "table" ? &table : nullptr));
    report = a.format == "table" ? take(table) : take(json) + "\n";
    if (a.format == "table") take(json);
  } else {
    const a11y_metrics metrics = score(variant);
    if (a.format == "table") {
      char* table = nullptr;
      check(a11y_metrics_table(a.variant.c_str(), &metrics, &table));
      report = take(table);
    } else {
      char* json = nullptr;
      check(a11y_metrics_json(&metrics, &json));
      nlohmann::ordered_json object;
      object["variant"] = a.variant;
      object["metrics"] = nlohmann::ordered_json::parse(take(json));
      report = object.dump(2) + "\n";
    }
  }
  write_output(a.out, report, out);
  return kExitOk;
}

void add_preprocess_flags(Overrides& o, CLI::App* sub) {
  o.add(sub, "--spell-correction", &RunConfig::spell_correction, "off | lexicon (default off)")
      ->check(CLI::IsMember({"off", "lexicon"}));
  o.add(sub, "--lexicon", &RunConfig::lexicon, "Word list used for spell correction");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detects accessibility issues in low-code app reviews.", "a11yrev"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  Overrides o;
  std::string config_path;
  app.add_option("--config", config_path, "Config file with [section] key = value entries");
  o.add(&app, "--seed", &RunConfig::seed, "Global seed for split, init, training and the hash embedder");
  o.add(&app, "--embedder", &RunConfig::embedder, "hash | hash:<dim> | service:<url> | local:<path> (default hash)");

  CrawlArgs crawl_args;
  CLI::App* crawl = app.add_subcommand("crawl", "Fetch review pages and extract bullet-point reviews");
  o.add(crawl, "--seeds", &RunConfig::seeds, "Seed URLs (comma-separated or repeated)")->delimiter(',');
  o.add(crawl, "--selector", &RunConfig::selector, "Selector for review containers");
  o.add(crawl, "--item-selector", &RunConfig::item_selector, "Selector for items inside a container (default li)");
  o.add(crawl, "--app-selector", &RunConfig::app_selector, "Selector for the app name (default h1)");
  o.add(crawl, "--delay-ms", &RunConfig::delay_ms, "Delay between requests to a host (default 1000)");
  o.add(crawl, "--max-pages", &RunConfig::max_pages, "Page fetch budget (default 100)");
  o.add(crawl, "--user-agent", &RunConfig::user_agent, "User-Agent header and robots.txt product token");
  crawl->add_option("--out", crawl_args.out, "Output line-records file")->required();

  PreprocessArgs pre_args;
  CLI::App* pre = app.add_subcommand("preprocess", "Normalize, filter short reviews and drop duplicates");
  pre->add_option("--in", pre_args.in, "Input dataset (.csv or .jsonl)")->required();
  pre->add_option("--out", pre_args.out, "Output dataset, - for standard output");
  pre->add_option("--format", pre_args.format, "auto | csv | jsonl")->check(CLI::IsMember({"auto", "csv", "jsonl"}));
  pre->add_option("--report", pre_args.report, "Write the JSON report here instead of standard error");
  o.add(pre, "--min-words", &RunConfig::min_words, "Minimum word count (default 5)");
  o.add_flag(pre, "--no-dedup", &RunConfig::dedup, false, "Keep duplicate reviews");
  add_preprocess_flags(o, pre);

  SplitArgs split_args;
  CLI::App* split = app.add_subcommand("split", "Stratified train/test split");
  split->add_option("--in", split_args.in, "Labeled dataset")->required();
  split->add_option("--train-out", split_args.train_out, "Train/validation output")->required();
  split->add_option("--test-out", split_args.test_out, "Test output")->required();
  split->add_option("--format", split_args.format, "auto | csv | jsonl")
      ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
  o.add(split, "--test-count", &RunConfig::test_count, "Number of test reviews (default 716)");

  EmbedArgs embed_args;
  CLI::App* embed = app.add_subcommand("embed", "Precompute an embeddings cache");
  embed->add_option("--data", embed_args.data, "Dataset to embed")->required();
  embed->add_option("--out", embed_args.out, "Cache file")->required();
  add_preprocess_flags(o, embed);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train the MLP classifier");
  train->add_option("--data", train_args.data, "Labeled training dataset")->required();
  train->add_option("--out", train_args.out, "Model file to write")->required();
  train->add_option("--embeddings", train_args.embeddings, "Embeddings cache instead of the embedder");
  o.add(train, "--epochs", &RunConfig::epochs, "Epochs (default 3)");
  o.add(train, "--learning-rate,--lr", &RunConfig::learning_rate, "Adam learning rate (default 0.005)");
  o.add(train, "--batch-size", &RunConfig::batch_size, "Minibatch size (default 32)");
  o.add(train, "--val-fraction", &RunConfig::val_fraction, "Held-out validation fraction (default 0.1)");
  add_preprocess_flags(o, train);

  ExtractArgs extract_args;
  CLI::App* extract = app.add_subcommand("extract-keywords", "Rank candidate keywords for curation");
  extract->add_option("--data", extract_args.data, "Labeled dataset")->required();
  extract->add_option("--out", extract_args.out, "JSON output, - for standard output");
  o.add(extract, "--max-n", &RunConfig::max_n, "Longest n-gram (default 3)");
  o.add(extract, "--top-k", &RunConfig::top_k, "Number of candidates (default 50)");

  PredictArgs predict_args;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Classify reviews");
  predict_cmd->add_option("--data", predict_args.data, "Dataset to classify")->required();
  predict_cmd->add_option("--model", predict_args.model, "Model file")->required();
  predict_cmd->add_option("--variant", predict_args.variant, "hybrid | no-keywords | model-only")
      ->check(CLI::IsMember({"hybrid", "no-keywords", "model-only"}));
  predict_cmd->add_option("--embeddings", predict_args.embeddings, "Embeddings cache instead of the embedder");
  predict_cmd->add_option("--out", predict_args.out, "Predictions (JSON lines), - for standard output");
  o.add(predict_cmd, "--keywords", &RunConfig::keywords, "Keyword directory");
  o.add(predict_cmd, "--threshold", &RunConfig::confidence_threshold, "Confidence threshold (default 0.80)");
  add_preprocess_flags(o, predict_cmd);

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against gold labels");
  evaluate->add_option("--test", eval_args.test, "Labeled test dataset")->required();
  evaluate->add_option("--model", eval_args.model, "Model file")->required();
  evaluate->add_option("--variant", eval_args.variant, "hybrid | no-keywords | model-only | both (default both)")
      ->check(CLI::IsMember({"hybrid", "no-keywords", "model-only", "both"}));
  evaluate->add_option("--embeddings", eval_args.embeddings, "Embeddings cache instead of the embedder");
  evaluate->add_option("--format", eval_args.format, "json | table")->check(CLI::IsMember({"json", "table"}));
  evaluate->add_option("--predictions-out", eval_args.predictions_out, "Also write predictions (single variant)");
  evaluate->add_option("--out", eval_args.out, "Report output, - for standard output");
  o.add(evaluate, "--keywords", &RunConfig::keywords, "Keyword directory");
  o.add(evaluate, "--threshold", &RunConfig::confidence_threshold, "Confidence threshold (default 0.80)");
  add_preprocess_flags(o, evaluate);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) apply_config_file(config, config_path);
    o.apply(config);
    config.validate();

    if (crawl->parsed()) return do_crawl(config, crawl_args, err);
    if (pre->parsed()) return do_preprocess(config, pre_args, out, err);
    if (split->parsed()) return do_split(config, split_args, out, err);
    if (embed->parsed()) return do_embed(config, embed_args, err);
    if (train->parsed()) return do_train(config, train_args, err);
    if (extract->parsed()) return do_extract(config, extract_args, out);
    if (predict_cmd->parsed()) return do_predict(config, predict_args, out);
    if (evaluate->parsed()) return do_evaluate(config, eval_args, out);
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace a11yrev::cli
