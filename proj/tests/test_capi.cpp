#include <gtest/gtest.h>

#include <map>
#include <string>

#include "a11yrev/a11yrev.h"
#include "json.hpp"
#include "support/test_support.hpp"

namespace t = a11yrev::testing;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  a11y_string_free(s);
  return out;
}

a11y_dataset* load(const std::string& fixture) {
  a11y_dataset* ds = nullptr;
  const std::string path = t::fixture_path(fixture).string();
  EXPECT_EQ(a11y_dataset_load(path.c_str(), a11y_format_for_path(path.c_str()), &ds), A11Y_OK) << a11y_last_error();
  return ds;
}

int fake_fetch(void* user_data, const char* url, a11y_buffer* body) {
  const auto& pages = *static_cast<std::map<std::string, std::string>*>(user_data);
  const auto it = pages.find(url);
  if (it == pages.end()) return 1;
  a11y_buffer_append(body, it->second.data(), it->second.size());
  return 0;
}

}  // namespace

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STREQ(a11y_status_name(A11Y_OK), "ok");
  EXPECT_STREQ(a11y_status_name(A11Y_ERR_CHECKSUM), "checksum error");
  EXPECT_NE(std::string(a11y_version()), "");
}

TEST(CApi, NullArgumentsAreInvalid) {
  a11y_dataset* ds = nullptr;
  EXPECT_EQ(a11y_dataset_load(nullptr, A11Y_FORMAT_DELIMITED_TABLE, &ds), A11Y_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(a11y_last_error()), "");
  EXPECT_EQ(a11y_model_load("x", nullptr), A11Y_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(a11y_normalize(nullptr, nullptr), A11Y_ERR_INVALID_ARGUMENT);
  a11y_metrics m;
  EXPECT_EQ(a11y_metrics_json(nullptr, nullptr), A11Y_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(a11y_metrics_from_counts(0, 0, 0, 0, &m), A11Y_ERR_INVALID_ARGUMENT);
  // Free functions accept NULL.
  a11y_dataset_free(nullptr);
  a11y_model_free(nullptr);
  a11y_embedder_free(nullptr);
  a11y_features_free(nullptr);
  a11y_keywords_free(nullptr);
  a11y_predictions_free(nullptr);
  a11y_string_free(nullptr);
}

TEST(CApi, ErrorCodesMapFromCore) {
  a11y_dataset* ds = nullptr;
  EXPECT_EQ(a11y_dataset_load("/nonexistent.csv", A11Y_FORMAT_DELIMITED_TABLE, &ds), A11Y_ERR_IO);
  EXPECT_EQ(ds, nullptr);
  const std::string bad = t::fixture_path("bad_label.jsonl").string();
  EXPECT_EQ(a11y_dataset_load(bad.c_str(), A11Y_FORMAT_LINE_RECORDS, &ds), A11Y_ERR_FORMAT);
  EXPECT_NE(std::string(a11y_last_error()).find("record 2"), std::string::npos);
  a11y_model* model = nullptr;
  EXPECT_EQ(a11y_model_load("/nonexistent/model.bin", &model), A11Y_ERR_NOT_FOUND);
  EXPECT_NE(std::string(a11y_last_error()).find("model not found"), std::string::npos);
  a11y_embedder* embedder = nullptr;
  EXPECT_EQ(a11y_embedder_create("local:/m", 0, &embedder), A11Y_ERR_PROVIDER);
}

TEST(CApi, DatasetViewsAndSplit) {
  a11y_dataset* ds = load("three_reviews.csv");
  ASSERT_NE(ds, nullptr);
  EXPECT_EQ(a11y_dataset_size(ds), 3u);
  a11y_review_view view;
  ASSERT_EQ(a11y_dataset_get(ds, 1, &view), A11Y_OK);
  EXPECT_STREQ(view.source, "crawled");
  EXPECT_EQ(view.label, 0);
  ASSERT_EQ(a11y_dataset_get(ds, 2, &view), A11Y_OK);
  EXPECT_EQ(view.label, A11Y_NO_LABEL);
  EXPECT_EQ(a11y_dataset_get(ds, 3, &view), A11Y_ERR_INVALID_ARGUMENT);
  a11y_class_balance balance;
  EXPECT_EQ(a11y_dataset_class_balance(ds, &balance), A11Y_ERR_DATA);
  a11y_dataset_free(ds);

  ds = load("mini_corpus.csv");
  a11y_dataset *train = nullptr, *test = nullptr;
  ASSERT_EQ(a11y_dataset_split(ds, 4, 1, &train, &test), A11Y_OK);
  EXPECT_EQ(a11y_dataset_size(train), 16u);
  ASSERT_EQ(a11y_dataset_class_balance(test, &balance), A11Y_OK);
  EXPECT_EQ(balance.positives, 2u);
  a11y_dataset_free(train);
  a11y_dataset_free(test);
  a11y_dataset_free(ds);
}

TEST(CApi, EndToEndOnMiniCorpus) {
  a11y_dataset* ds = load("mini_corpus.csv");
  a11y_embedder* embedder = nullptr;
  ASSERT_EQ(a11y_embedder_create("hash:32", 0, &embedder), A11Y_OK);
  EXPECT_EQ(a11y_embedder_dim(embedder), 32u);
  a11y_preprocess_config pre;
  a11y_preprocess_config_init(&pre);
  EXPECT_EQ(pre.min_words, 5u);
  a11y_features* features = nullptr;
  ASSERT_EQ(a11y_features_compute(embedder, ds, &pre, &features), A11Y_OK) << a11y_last_error();
  EXPECT_EQ(a11y_features_rows(features), 20u);
  EXPECT_EQ(a11y_features_dim(features), 32u);

  t::TempDir dir;
  const std::string cache = (dir / "cache.tsv").string();
  ASSERT_EQ(a11y_features_save_cache(features, cache.c_str()), A11Y_OK);
  a11y_features* cached = nullptr;
  ASSERT_EQ(a11y_features_load_cache(cache.c_str(), ds, &cached), A11Y_OK);
  EXPECT_EQ(a11y_features_rows(cached), 20u);

  a11y_train_config tc;
  a11y_train_config_init(&tc);
  EXPECT_EQ(tc.epochs, 3u);
  EXPECT_EQ(tc.batch_size, 32u);
  tc.epochs = 5;
  a11y_epoch_stats history[5];
  a11y_model* model = nullptr;
  ASSERT_EQ(a11y_model_train(cached, ds, &tc, &model, history), A11Y_OK) << a11y_last_error();
  EXPECT_EQ(a11y_model_input_dim(model), 32u);
  EXPECT_GT(history[0].train_loss, 0.0);

  const std::string model_path = (dir / "m.bin").string();
  ASSERT_EQ(a11y_model_save(model, model_path.c_str()), A11Y_OK);
  a11y_model* loaded = nullptr;
  ASSERT_EQ(a11y_model_load(model_path.c_str(), &loaded), A11Y_OK);

  a11y_keywords* keywords = nullptr;
  const std::string kw_dir = std::string(A11YREV_SOURCE_DIR) + "/data/keywords";
  ASSERT_EQ(a11y_keywords_load(kw_dir.c_str(), &keywords), A11Y_OK) << a11y_last_error();

  a11y_hybrid_config hc;
  a11y_hybrid_config_init(&hc);
  EXPECT_EQ(hc.confidence_threshold, 0.80);
  a11y_predictions* preds = nullptr;
  EXPECT_EQ(a11y_predict_dataset(features, ds, loaded, nullptr, &pre, &hc, A11Y_VARIANT_HYBRID, &preds),
            A11Y_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(a11y_predict_dataset(features, ds, loaded, keywords, &pre, &hc, A11Y_VARIANT_HYBRID, &preds), A11Y_OK)
      << a11y_last_error();
  EXPECT_EQ(a11y_predictions_size(preds), 20u);
  const std::string jsonl = take([&] {
    char* s = nullptr;
    EXPECT_EQ(a11y_predictions_to_jsonl(preds, &s), A11Y_OK);
    return s;
  }());
  const auto first = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
  EXPECT_TRUE(first.contains("decision_path"));
  a11y_metrics m;
  ASSERT_EQ(a11y_predictions_score(preds, ds, &m), A11Y_OK);
  EXPECT_EQ(m.n, 20u);

  a11y_prediction one;
  ASSERT_EQ(a11y_classify_text(embedder, loaded, keywords, &pre, &hc, "The contrast is far too low", &one), A11Y_OK);
  EXPECT_TRUE(one.label == 0 || one.label == 1);
  EXPECT_NEAR(one.p0 + one.p1, 1.0, 1e-12);
  a11y_string_free(one.matched_keywords);

  a11y_model* small = nullptr;
  ASSERT_EQ(a11y_model_init(1, 8, &small), A11Y_OK);
  a11y_predictions* mismatch = nullptr;
  EXPECT_EQ(a11y_predict_dataset(features, ds, small, keywords, &pre, &hc, A11Y_VARIANT_HYBRID, &mismatch),
            A11Y_ERR_INVALID_ARGUMENT);

  a11y_model_free(small);
  a11y_predictions_free(preds);
  a11y_keywords_free(keywords);
  a11y_model_free(loaded);
  a11y_model_free(model);
  a11y_features_free(cached);
  a11y_features_free(features);
  a11y_embedder_free(embedder);
  a11y_dataset_free(ds);
}

TEST(CApi, MetricsAndAblationJson) {
  a11y_metrics h, k;
  ASSERT_EQ(a11y_metrics_from_counts(287, 97, 272, 60, &h), A11Y_OK);
  ASSERT_EQ(a11y_metrics_from_counts(270, 95, 274, 77, &k), A11Y_OK);
  EXPECT_NEAR(h.recall, 287.0 / 347.0, 1e-15);
  char* json = nullptr;
  char* table = nullptr;
  ASSERT_EQ(a11y_ablation_report(&h, &k, &json, &table), A11Y_OK);
  const auto report = nlohmann::json::parse(take(json));
  EXPECT_EQ(report["ablation"].size(), 4u);
  EXPECT_EQ(report["reference_percent"].size(), 5u);
  EXPECT_NE(take(table).find("Hybrid (this run)"), std::string::npos);
  a11y_metrics other;
  ASSERT_EQ(a11y_metrics_from_counts(1, 0, 0, 0, &other), A11Y_OK);
  EXPECT_EQ(a11y_ablation_report(&h, &other, &json, nullptr), A11Y_ERR_INVALID_ARGUMENT);
}

TEST(CApi, CrawlThroughCallback) {
  std::map<std::string, std::string> pages{
      {"https://reviews.example/robots.txt", t::read_file(t::fixture_path("crawl/robots.txt"))},
      {"https://reviews.example/apps/formflow", t::read_file(t::fixture_path("crawl/app_formflow.html"))},
  };
  const char* seeds[] = {"https://reviews.example/apps/formflow", "https://reviews.example/private/x"};
  a11y_crawl_config config{};
  config.seed_urls = seeds;
  config.seed_count = 2;
  config.review_selector = "div.review";
  config.delay_ms = 0;
  config.max_pages = 10;
  t::TempDir dir;
  const std::string out = (dir / "raw.jsonl").string();
  a11y_crawl_summary summary{};
  char* diagnostics = nullptr;
  ASSERT_EQ(a11y_crawl(&config, fake_fetch, &pages, out.c_str(), &summary, &diagnostics), A11Y_OK)
      << a11y_last_error();
  EXPECT_EQ(summary.records, 4u);
  EXPECT_EQ(summary.pages_fetched, 1u);
  EXPECT_NE(take(diagnostics).find("blocked by robots"), std::string::npos);
  a11y_dataset* ds = nullptr;
  ASSERT_EQ(a11y_dataset_load(out.c_str(), A11Y_FORMAT_LINE_RECORDS, &ds), A11Y_OK) << a11y_last_error();
  EXPECT_EQ(a11y_dataset_size(ds), 4u);
  a11y_dataset_free(ds);
}
