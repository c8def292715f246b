#include "a11yrev/a11yrev.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "a11yrev/classifier.hpp"
#include "a11yrev/corpus.hpp"
#include "a11yrev/crawler.hpp"
#include "a11yrev/embedding.hpp"
#include "a11yrev/error.hpp"
#include "a11yrev/evaluation.hpp"
#include "a11yrev/hybrid.hpp"
#include "a11yrev/keywords.hpp"
#include "a11yrev/preprocess.hpp"
#include "json.hpp"

using namespace a11yrev;

struct a11y_dataset {
  LabeledDataset value;
};

struct a11y_embedder {
  ConcatEmbedder value;
};

struct a11y_features {
  std::vector<std::string> ids;
  Matrix rows;
};

struct a11y_model {
  MlpModel value;
};

struct a11y_keywords {
  KeywordSets value;
};

struct a11y_predictions {
  std::vector<std::string> ids;
  std::vector<HybridPrediction> items;
};

struct a11y_buffer {
  std::string bytes;
};

namespace {

thread_local std::string g_last_error;

a11y_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return A11Y_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io:
      return A11Y_ERR_IO;
    case ErrorCode::Format:
      return A11Y_ERR_FORMAT;
    case ErrorCode::Data:
      return A11Y_ERR_DATA;
    case ErrorCode::NotFound:
      return A11Y_ERR_NOT_FOUND;
    case ErrorCode::VersionMismatch:
      return A11Y_ERR_VERSION;
    case ErrorCode::Checksum:
      return A11Y_ERR_CHECKSUM;
    case ErrorCode::Provider:
      return A11Y_ERR_PROVIDER;
  }
  return A11Y_ERR_INTERNAL;
}

template <typename F>
a11y_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return A11Y_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return A11Y_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return A11Y_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return A11Y_ERR_INTERNAL;
  }
}

void require(const void* pointer, const char* name) {
  if (!pointer) fail(ErrorCode::InvalidArgument, std::string(name) + " must not be NULL");
}

char* duplicate(const std::string& text) {
  auto* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.data(), text.size());
  out[text.size()] = '\0';
  return out;
}

DatasetFormat to_format(a11y_format format) {
  switch (format) {
    case A11Y_FORMAT_DELIMITED_TABLE:
      return DatasetFormat::DelimitedTable;
    case A11Y_FORMAT_LINE_RECORDS:
      return DatasetFormat::LineRecords;
  }
  fail(ErrorCode::InvalidArgument, "unknown dataset format");
}

PreprocessConfig to_preprocess(const a11y_preprocess_config* c) {
  PreprocessConfig config;
  if (!c) return config;
  config.min_words = c->min_words;
  config.spell_correction = c->spell_correction ? SpellCorrection::Lexicon : SpellCorrection::Off;
  if (c->lexicon_path) config.lexicon_path = c->lexicon_path;
  config.dedup = c->dedup != 0;
  return config;
}

HybridConfig to_hybrid(const a11y_hybrid_config* c) {
  HybridConfig config;
  if (c) {
    config.confidence_threshold = c->confidence_threshold;
    config.keywords_enabled = c->keywords_enabled != 0;
  }
  config.validate();
  return config;
}

MetricsReport to_report(const a11y_metrics& m) {
  MetricsReport r;
  r.accuracy = m.accuracy;
  r.recall = m.recall;
  r.precision = m.precision;
  r.f1 = m.f1;
  r.n = m.n;
  r.counts = {m.tp, m.fp, m.tn, m.fn};
  r.degenerate_flags = static_cast<std::uint8_t>(m.degenerate_flags);
  return r;
}

a11y_metrics from_report(const MetricsReport& r) {
  a11y_metrics m{};
  m.accuracy = r.accuracy;
  m.recall = r.recall;
  m.precision = r.precision;
  m.f1 = r.f1;
  m.n = r.n;
  m.tp = r.counts.tp;
  m.fp = r.counts.fp;
  m.tn = r.counts.tn;
  m.fn = r.counts.fn;
  m.degenerate_flags = r.degenerate_flags;
  return m;
}

std::string join_keywords(const std::vector<std::string>& keywords) {
  std::string out;
  for (const auto& k : keywords) {
    if (!out.empty()) out.push_back('|');
    out += k;
  }
  return out;
}

nlohmann::ordered_json reference_json() {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : reference_rows()) {
    rows.push_back({{"model", row.model},
                    {"accuracy", row.accuracy},
                    {"recall", row.recall},
                    {"precision", row.precision},
                    {"f1", row.f1}});
  }
  return rows;
}

std::vector<std::pair<std::string, MetricsReport>> reference_reports() {
  std::vector<std::pair<std::string, MetricsReport>> rows;
  for (const auto& row : reference_rows()) {
    MetricsReport r;
    r.accuracy = row.accuracy / 100.0;
    r.recall = row.recall / 100.0;
    r.precision = row.precision / 100.0;
    r.f1 = row.f1 / 100.0;
    rows.emplace_back(std::string(row.model) + " (published)", r);
  }
  return rows;
}

}  // namespace

extern "C" {

const char* a11y_version(void) { return "1.0.0"; }

const char* a11y_last_error(void) { return g_last_error.c_str(); }

const char* a11y_status_name(a11y_status status) {
  switch (status) {
    case A11Y_OK:
      return "ok";
    case A11Y_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case A11Y_ERR_IO:
      return "i/o error";
    case A11Y_ERR_FORMAT:
      return "format error";
    case A11Y_ERR_DATA:
      return "data error";
    case A11Y_ERR_NOT_FOUND:
      return "not found";
    case A11Y_ERR_VERSION:
      return "version mismatch";
    case A11Y_ERR_CHECKSUM:
      return "checksum error";
    case A11Y_ERR_PROVIDER:
      return "embedding provider error";
    case A11Y_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void a11y_string_free(char* s) { std::free(s); }

a11y_format a11y_format_for_path(const char* path) {
  if (!path) return A11Y_FORMAT_DELIMITED_TABLE;
  return format_for_path(path) == DatasetFormat::LineRecords ? A11Y_FORMAT_LINE_RECORDS : A11Y_FORMAT_DELIMITED_TABLE;
}

a11y_status a11y_dataset_load(const char* path, a11y_format format, a11y_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new a11y_dataset{load_reviews(path, to_format(format))};
  });
}

a11y_status a11y_dataset_save(const a11y_dataset* dataset, const char* path, a11y_format format) {
  return guarded([&] {
    require(dataset, "dataset");
    require(path, "path");
    save_reviews(dataset->value, path, to_format(format));
  });
}

a11y_status a11y_dataset_serialize(const a11y_dataset* dataset, a11y_format format, char** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = duplicate(serialize_reviews(dataset->value, to_format(format)));
  });
}

size_t a11y_dataset_size(const a11y_dataset* dataset) { return dataset ? dataset->value.size() : 0; }

a11y_status a11y_dataset_get(const a11y_dataset* dataset, size_t index, a11y_review_view* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    if (index >= dataset->value.size()) fail(ErrorCode::InvalidArgument, "review index out of range");
    const Review& r = dataset->value.reviews[index];
    out->id = r.id.c_str();
    out->app_name = r.app_name.c_str();
    out->source = to_string(r.source);
    out->raw_text = r.raw_text.c_str();
    out->text = r.text.c_str();
    out->label = r.label ? *r.label : A11Y_NO_LABEL;
  });
}

a11y_status a11y_dataset_class_balance(const a11y_dataset* dataset, a11y_class_balance* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    const ClassBalance b = class_balance(dataset->value);
    *out = {b.total, b.positives, b.negatives};
  });
}

a11y_status a11y_dataset_split(const a11y_dataset* dataset, size_t test_count, uint64_t seed,
                               a11y_dataset** train_val, a11y_dataset** test) {
  return guarded([&] {
    require(dataset, "dataset");
    require(train_val, "train_val");
    require(test, "test");
    Split split = stratified_split(dataset->value, test_count, seed);
    auto first = std::make_unique<a11y_dataset>(a11y_dataset{std::move(split.train_val)});
    auto second = std::make_unique<a11y_dataset>(a11y_dataset{std::move(split.test)});
    *train_val = first.release();
    *test = second.release();
  });
}

void a11y_dataset_free(a11y_dataset* dataset) { delete dataset; }

void a11y_preprocess_config_init(a11y_preprocess_config* config) {
  if (!config) return;
  config->min_words = 5;
  config->spell_correction = 0;
  config->lexicon_path = nullptr;
  config->dedup = 1;
}

a11y_status a11y_preprocess(const a11y_dataset* dataset, const a11y_preprocess_config* config,
                            a11y_dataset** out, a11y_preprocess_report* report) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    PreprocessResult result = preprocess_dataset(dataset->value, to_preprocess(config));
    if (report) {
      *report = {result.report.input_count, result.report.corrected_count, result.report.removed_short,
                 result.report.removed_duplicate, result.report.output_count};
    }
    *out = new a11y_dataset{std::move(result.dataset)};
  });
}

a11y_status a11y_preprocess_report_json(const a11y_preprocess_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    PreprocessReport r{report->input_count, report->corrected_count, report->removed_short,
                       report->removed_duplicate, report->output_count};
    *out = duplicate(to_json(r));
  });
}

a11y_status a11y_normalize(const char* text, char** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = duplicate(normalize(text));
  });
}

void a11y_buffer_append(a11y_buffer* buffer, const char* data, size_t size) {
  if (buffer && data) buffer->bytes.append(data, size);
}

a11y_status a11y_crawl(const a11y_crawl_config* config, a11y_fetch_fn fetch, void* user_data,
                       const char* out_path, a11y_crawl_summary* summary, char** diagnostics) {
  return guarded([&] {
    require(config, "config");
    require(out_path, "out_path");
    CrawlConfig c;
    if (config->seed_count) require(config->seed_urls, "seed_urls");
    for (size_t i = 0; i < config->seed_count; ++i) {
      require(config->seed_urls[i], "seed url");
      c.seed_urls.emplace_back(config->seed_urls[i]);
    }
    if (config->review_selector) c.review_selector = config->review_selector;
    if (config->item_selector) c.item_selector = config->item_selector;
    if (config->app_selector) c.app_selector = config->app_selector;
    if (config->user_agent) c.user_agent = config->user_agent;
    c.delay_ms = config->delay_ms;
    c.max_pages = config->max_pages;

    CrawlEnvironment env = default_crawl_environment(c.user_agent);
    if (fetch) {
      env.fetch = [fetch, user_data](const std::string& url) {
        a11y_buffer body;
        if (fetch(user_data, url.c_str(), &body) != 0) throw FetchError("fetch callback failed for " + url);
        return std::move(body.bytes);
      };
    }
    CrawlResult result = crawl(c, env);
    save_raw_records(result.records, out_path);
    if (summary) *summary = {result.records.size(), result.pages_fetched};
    if (diagnostics) {
      std::string joined;
      for (const auto& d : result.diagnostics) joined += d + "\n";
      *diagnostics = duplicate(joined);
    }
  });
}

a11y_status a11y_embedder_create(const char* spec, uint64_t seed, a11y_embedder** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    *out = new a11y_embedder{make_embedder(spec, seed)};
  });
}

size_t a11y_embedder_dim(const a11y_embedder* embedder) { return embedder ? embedder->value.total_dim() : 0; }

a11y_status a11y_embedder_embed(const a11y_embedder* embedder, const char* text, double* out, size_t capacity) {
  return guarded([&] {
    require(embedder, "embedder");
    require(text, "text");
    require(out, "out");
    if (capacity < embedder->value.total_dim()) fail(ErrorCode::InvalidArgument, "output buffer too small");
    const EmbeddingVector v = embedder->value.embed(text);
    std::copy(v.values.begin(), v.values.end(), out);
  });
}

void a11y_embedder_free(a11y_embedder* embedder) { delete embedder; }

a11y_status a11y_features_compute(const a11y_embedder* embedder, const a11y_dataset* dataset,
                                  const a11y_preprocess_config* preprocess, a11y_features** out) {
  return guarded([&] {
    require(embedder, "embedder");
    require(dataset, "dataset");
    require(out, "out");
    const Preprocessor preprocessor(to_preprocess(preprocess));
    const auto texts = review_texts(dataset->value, preprocessor);
    auto features = std::make_unique<a11y_features>();
    features->rows = embedder->value.embed_batch(texts);
    for (const Review& r : dataset->value.reviews) features->ids.push_back(r.id);
    *out = features.release();
  });
}

a11y_status a11y_features_load_cache(const char* path, const a11y_dataset* dataset, a11y_features** out) {
  return guarded([&] {
    require(path, "path");
    require(dataset, "dataset");
    require(out, "out");
    const EmbeddingCache cache = load_embedding_cache(path);
    auto features = std::make_unique<a11y_features>();
    for (const Review& r : dataset->value.reviews) features->ids.push_back(r.id);
    features->rows = select_rows(cache, features->ids);
    *out = features.release();
  });
}

a11y_status a11y_features_save_cache(const a11y_features* features, const char* path) {
  return guarded([&] {
    require(features, "features");
    require(path, "path");
    EmbeddingCache cache;
    cache.dim = static_cast<std::size_t>(features->rows.cols());
    cache.ids = features->ids;
    cache.vectors = features->rows;
    save_embedding_cache(cache, path);
  });
}

size_t a11y_features_rows(const a11y_features* features) {
  return features ? static_cast<size_t>(features->rows.rows()) : 0;
}

size_t a11y_features_dim(const a11y_features* features) {
  return features ? static_cast<size_t>(features->rows.cols()) : 0;
}

void a11y_features_free(a11y_features* features) { delete features; }

void a11y_train_config_init(a11y_train_config* config) {
  if (!config) return;
  const TrainConfig defaults;
  config->epochs = defaults.epochs;
  config->learning_rate = defaults.learning_rate;
  config->batch_size = defaults.batch_size;
  config->val_fraction = defaults.val_fraction;
  config->seed = defaults.seed;
  config->adam_beta1 = defaults.adam_beta1;
  config->adam_beta2 = defaults.adam_beta2;
  config->adam_epsilon = defaults.adam_epsilon;
}

a11y_status a11y_model_init(uint64_t seed, size_t input_dim, a11y_model** out) {
  return guarded([&] {
    require(out, "out");
    LayerDims dims = kDefaultLayerDims;
    dims.front() = input_dim;
    *out = new a11y_model{init_model(seed, dims)};
  });
}

a11y_status a11y_model_train(const a11y_features* features, const a11y_dataset* dataset,
                             const a11y_train_config* config, a11y_model** out, a11y_epoch_stats* history) {
  return guarded([&] {
    require(features, "features");
    require(dataset, "dataset");
    require(config, "config");
    require(out, "out");
    if (static_cast<std::size_t>(features->rows.rows()) != dataset->value.size()) {
      fail(ErrorCode::InvalidArgument, "features and dataset differ in size");
    }
    std::vector<int> labels;
    for (const Review& r : dataset->value.reviews) {
      if (!r.label) fail(ErrorCode::Data, "training review '" + r.id + "' has no label");
      labels.push_back(*r.label);
    }
    TrainConfig c;
    c.epochs = config->epochs;
    c.learning_rate = config->learning_rate;
    c.batch_size = config->batch_size;
    c.val_fraction = config->val_fraction;
    c.seed = config->seed;
    c.adam_beta1 = config->adam_beta1;
    c.adam_beta2 = config->adam_beta2;
    c.adam_epsilon = config->adam_epsilon;
    LayerDims dims = kDefaultLayerDims;
    dims.front() = static_cast<std::size_t>(features->rows.cols());
    TrainResult result = train(init_model(c.seed, dims), features->rows, labels, c);
    if (history) {
      for (std::size_t e = 0; e < result.history.epochs.size(); ++e) {
        history[e].train_loss = result.history.epochs[e].train_loss;
        history[e].val_accuracy = result.history.epochs[e].val_accuracy.value_or(-1.0);
      }
    }
    *out = new a11y_model{std::move(result.model)};
  });
}

a11y_status a11y_model_save(const a11y_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    save_model(model->value, path);
  });
}

a11y_status a11y_model_load(const char* path, a11y_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new a11y_model{load_model(path)};
  });
}

size_t a11y_model_input_dim(const a11y_model* model) { return model ? model->value.input_dim() : 0; }

void a11y_model_free(a11y_model* model) { delete model; }

a11y_status a11y_keywords_load(const char* dir, a11y_keywords** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new a11y_keywords{load_keyword_sets(dir)};
  });
}

a11y_status a11y_keywords_save(const a11y_keywords* keywords, const char* dir) {
  return guarded([&] {
    require(keywords, "keywords");
    require(dir, "dir");
    save_keyword_sets(keywords->value, dir);
  });
}

void a11y_keywords_free(a11y_keywords* keywords) { delete keywords; }

a11y_status a11y_keywords_extract(const a11y_dataset* dataset, size_t max_n, size_t top_k, char** json_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(json_out, "json_out");
    std::vector<std::string> pos, neg;
    for (const Review& r : dataset->value.reviews) {
      if (!r.label) fail(ErrorCode::Data, "keyword extraction needs labels; review '" + r.id + "' has none");
      (*r.label == 1 ? pos : neg).push_back(r.raw_text);
    }
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const auto& c : extract_candidates(pos, neg, max_n, top_k)) {
      array.push_back({{"phrase", c.phrase}, {"score", c.score}, {"pos_freq", c.pos_freq}, {"neg_freq", c.neg_freq}});
    }
    *json_out = duplicate(array.dump());
  });
}

void a11y_hybrid_config_init(a11y_hybrid_config* config) {
  if (!config) return;
  config->confidence_threshold = 0.80;
  config->keywords_enabled = 1;
}

a11y_status a11y_classify_text(const a11y_embedder* embedder, const a11y_model* model,
                               const a11y_keywords* keywords, const a11y_preprocess_config* preprocess,
                               const a11y_hybrid_config* config, const char* raw_text, a11y_prediction* out) {
  return guarded([&] {
    require(embedder, "embedder");
    require(model, "model");
    require(raw_text, "raw_text");
    require(out, "out");
    const HybridConfig hybrid = to_hybrid(config);
    if (hybrid.keywords_enabled) require(keywords, "keywords");
    const KeywordSets empty;
    const Preprocessor preprocessor(to_preprocess(preprocess));
    const Pipeline pipeline{preprocessor, embedder->value, model->value, keywords ? keywords->value : empty, hybrid};
    const HybridPrediction p = classify_review(raw_text, pipeline);
    out->label = p.label;
    out->confidence = p.confidence;
    out->decision_path = to_string(p.decision_path);
    out->matched_keywords = duplicate(join_keywords(p.matched_keywords));
    out->p0 = p.model_probabilities[0];
    out->p1 = p.model_probabilities[1];
  });
}

a11y_status a11y_predict_dataset(const a11y_features* features, const a11y_dataset* dataset, const a11y_model* model,
                                 const a11y_keywords* keywords, const a11y_preprocess_config* preprocess,
                                 const a11y_hybrid_config* config, a11y_variant variant, a11y_predictions** out) {
  return guarded([&] {
    require(features, "features");
    require(dataset, "dataset");
    require(model, "model");
    require(out, "out");
    Variant v;
    switch (variant) {
      case A11Y_VARIANT_HYBRID:
        v = Variant::Hybrid;
        require(keywords, "keywords");
        break;
      case A11Y_VARIANT_NO_KEYWORDS:
        v = Variant::NoKeywords;
        break;
      case A11Y_VARIANT_MODEL_ONLY:
        v = Variant::ModelOnly;
        break;
      default:
        fail(ErrorCode::InvalidArgument, "unknown variant");
    }
    if (features->ids.size() != dataset->value.size()) {
      fail(ErrorCode::InvalidArgument, "features and dataset differ in size");
    }
    for (std::size_t i = 0; i < features->ids.size(); ++i) {
      if (features->ids[i] != dataset->value.reviews[i].id) {
        fail(ErrorCode::InvalidArgument, "features are not aligned with the dataset at review '" +
                                             dataset->value.reviews[i].id + "'");
      }
    }
    const Preprocessor preprocessor(to_preprocess(preprocess));
    const auto texts = review_texts(dataset->value, preprocessor);
    const KeywordSets empty;
    auto predictions = std::make_unique<a11y_predictions>();
    predictions->ids = features->ids;
    predictions->items = classify_texts(v, texts, features->rows, model->value, keywords ? keywords->value : empty,
                                        to_hybrid(config));
    *out = predictions.release();
  });
}

size_t a11y_predictions_size(const a11y_predictions* predictions) {
  return predictions ? predictions->items.size() : 0;
}

a11y_status a11y_predictions_to_jsonl(const a11y_predictions* predictions, char** out) {
  return guarded([&] {
    require(predictions, "predictions");
    require(out, "out");
    std::string lines;
    for (std::size_t i = 0; i < predictions->items.size(); ++i) {
      const HybridPrediction& p = predictions->items[i];
      nlohmann::ordered_json record;
      record["id"] = predictions->ids[i];
      record["label"] = p.label;
      record["confidence"] = p.confidence;
      record["decision_path"] = to_string(p.decision_path);
      record["matched_keywords"] = p.matched_keywords;
      record["p0"] = p.model_probabilities[0];
      record["p1"] = p.model_probabilities[1];
      lines += record.dump();
      lines += '\n';
    }
    *out = duplicate(lines);
  });
}

a11y_status a11y_predictions_save(const a11y_predictions* predictions, const char* path) {
  char* text = nullptr;
  const a11y_status status = a11y_predictions_to_jsonl(predictions, &text);
  if (status != A11Y_OK) return status;
  std::unique_ptr<char, decltype(&std::free)> owned(text, &std::free);
  return guarded([&] {
    require(path, "path");
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorCode::Io, std::string("cannot write predictions '") + path + "'");
    file << owned.get();
    if (!file.flush()) fail(ErrorCode::Io, std::string("write failed for '") + path + "'");
  });
}

a11y_status a11y_predictions_score(const a11y_predictions* predictions, const a11y_dataset* gold, a11y_metrics* out) {
  return guarded([&] {
    require(predictions, "predictions");
    require(gold, "gold");
    require(out, "out");
    if (predictions->items.size() != gold->value.size()) {
      fail(ErrorCode::InvalidArgument, "predictions and gold dataset differ in size");
    }
    *out = from_report(score_predictions(predictions->items, gold->value));
  });
}

void a11y_predictions_free(a11y_predictions* predictions) { delete predictions; }

a11y_status a11y_metrics_from_counts(size_t tp, size_t fp, size_t tn, size_t fn, a11y_metrics* out) {
  return guarded([&] {
    require(out, "out");
    *out = from_report(metrics({tp, fp, tn, fn}));
  });
}

a11y_status a11y_metrics_json(const a11y_metrics* m, char** out) {
  return guarded([&] {
    require(m, "metrics");
    require(out, "out");
    *out = duplicate(to_json(to_report(*m)));
  });
}

a11y_status a11y_ablation_report(const a11y_metrics* hybrid, const a11y_metrics* no_keywords, char** json_out,
                                 char** table_out) {
  return guarded([&] {
    require(hybrid, "hybrid");
    require(no_keywords, "no_keywords");
    require(json_out, "json_out");
    const MetricsReport h = to_report(*hybrid);
    const MetricsReport k = to_report(*no_keywords);
    const auto rows = ablation_report(h, k);
    nlohmann::ordered_json report;
    report["hybrid"] = nlohmann::ordered_json::parse(to_json(h));
    report["no_keywords"] = nlohmann::ordered_json::parse(to_json(k));
    report["ablation"] = nlohmann::ordered_json::parse(ablation_to_json(rows));
    report["reference_percent"] = reference_json();
    std::string table;
    if (table_out) {
      std::vector<std::pair<std::string, MetricsReport>> table_rows = reference_reports();
      table_rows.emplace_back("Hybrid (this run)", h);
      table_rows.emplace_back("Hybrid (No Keywords) (this run)", k);
      table = render_table(table_rows) + "\n" + render_ablation_table(rows);
    }
    char* json_text = duplicate(report.dump(2));
    if (table_out) {
      try {
        *table_out = duplicate(table);
      } catch (...) {
        std::free(json_text);
        throw;
      }
    }
    *json_out = json_text;
  });
}

a11y_status a11y_metrics_table(const char* name, const a11y_metrics* m, char** out) {
  return guarded([&] {
    require(m, "metrics");
    require(out, "out");
    std::vector<std::pair<std::string, MetricsReport>> rows = reference_reports();
    rows.emplace_back(name ? name : "this run", to_report(*m));
    *out = duplicate(render_table(rows));
  });
}

}  // extern "C"
