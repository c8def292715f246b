/*
 * C interface to the accessibility review classifier.
 *
 * Every object is an opaque handle released with its *_free function.
 * Functions return A11Y_OK or an error status; the message for the most
 * recent failure on the calling thread is available from a11y_last_error().
 * Strings returned through char** out-parameters are heap allocated and must
 * be released with a11y_string_free().
 */
#ifndef A11YREV_A11YREV_H
#define A11YREV_A11YREV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(A11Y_BUILDING_LIBRARY)
#    define A11Y_API __declspec(dllexport)
#  else
#    define A11Y_API __declspec(dllimport)
#  endif
#else
#  define A11Y_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum a11y_status {
  A11Y_OK = 0,
  A11Y_ERR_INVALID_ARGUMENT = 1,
  A11Y_ERR_IO = 2,
  A11Y_ERR_FORMAT = 3,
  A11Y_ERR_DATA = 4,
  A11Y_ERR_NOT_FOUND = 5,
  A11Y_ERR_VERSION = 6,
  A11Y_ERR_CHECKSUM = 7,
  A11Y_ERR_PROVIDER = 8,
  A11Y_ERR_INTERNAL = 9
} a11y_status;

A11Y_API const char* a11y_version(void);
A11Y_API const char* a11y_last_error(void);
A11Y_API const char* a11y_status_name(a11y_status status);
A11Y_API void a11y_string_free(char* s);

/* ---- corpus ---------------------------------------------------------- */

typedef struct a11y_dataset a11y_dataset;

typedef enum a11y_format {
  A11Y_FORMAT_DELIMITED_TABLE = 0,
  A11Y_FORMAT_LINE_RECORDS = 1
} a11y_format;

/* Label value reported for reviews without a gold label. */
#define A11Y_NO_LABEL (-1)

typedef struct a11y_review_view {
  const char* id;
  const char* app_name;
  const char* source; /* "crawled" or "imported" */
  const char* raw_text;
  const char* text;
  int label; /* 0, 1 or A11Y_NO_LABEL */
} a11y_review_view;

typedef struct a11y_class_balance {
  size_t total;
  size_t positives;
  size_t negatives;
} a11y_class_balance;

A11Y_API a11y_format a11y_format_for_path(const char* path);
A11Y_API a11y_status a11y_dataset_load(const char* path, a11y_format format, a11y_dataset** out);
A11Y_API a11y_status a11y_dataset_save(const a11y_dataset* dataset, const char* path, a11y_format format);
A11Y_API a11y_status a11y_dataset_serialize(const a11y_dataset* dataset, a11y_format format, char** out);
A11Y_API size_t a11y_dataset_size(const a11y_dataset* dataset);
/* The view borrows from the dataset and stays valid until it is freed. */
A11Y_API a11y_status a11y_dataset_get(const a11y_dataset* dataset, size_t index, a11y_review_view* out);
A11Y_API a11y_status a11y_dataset_class_balance(const a11y_dataset* dataset, a11y_class_balance* out);
A11Y_API a11y_status a11y_dataset_split(const a11y_dataset* dataset, size_t test_count, uint64_t seed,
                                        a11y_dataset** train_val, a11y_dataset** test);
A11Y_API void a11y_dataset_free(a11y_dataset* dataset);

/* ---- preprocess ------------------------------------------------------ */

typedef struct a11y_preprocess_config {
  size_t min_words;          /* default 5 */
  int spell_correction;      /* 0 = off, 1 = lexicon */
  const char* lexicon_path;  /* required when spell_correction = 1 */
  int dedup;                 /* default 1 */
} a11y_preprocess_config;

typedef struct a11y_preprocess_report {
  size_t input_count;
  size_t corrected_count;
  size_t removed_short;
  size_t removed_duplicate;
  size_t output_count;
} a11y_preprocess_report;

A11Y_API void a11y_preprocess_config_init(a11y_preprocess_config* config);
A11Y_API a11y_status a11y_preprocess(const a11y_dataset* dataset, const a11y_preprocess_config* config,
                                     a11y_dataset** out, a11y_preprocess_report* report);
A11Y_API a11y_status a11y_preprocess_report_json(const a11y_preprocess_report* report, char** out);
A11Y_API a11y_status a11y_normalize(const char* text, char** out);

/* ---- crawler --------------------------------------------------------- */

typedef struct a11y_buffer a11y_buffer;

/* Appends fetched bytes to the body buffer handed to a fetch callback. */
A11Y_API void a11y_buffer_append(a11y_buffer* buffer, const char* data, size_t size);

/* Returns 0 on success; any other value marks the fetch as failed. */
typedef int (*a11y_fetch_fn)(void* user_data, const char* url, a11y_buffer* body);

typedef struct a11y_crawl_config {
  const char* const* seed_urls;
  size_t seed_count;
  const char* review_selector;
  const char* item_selector;  /* NULL: "li" */
  const char* app_selector;   /* NULL: "h1" */
  uint32_t delay_ms;
  const char* user_agent;     /* NULL: built-in agent string */
  size_t max_pages;
} a11y_crawl_config;

typedef struct a11y_crawl_summary {
  size_t records;
  size_t pages_fetched;
} a11y_crawl_summary;

/* fetch == NULL uses the built-in HTTP(S) client with real delays. Output is
 * a line-records file of {url, app_name, text, fetched_at}. diagnostics
 * (optional) receives newline-separated messages. */
A11Y_API a11y_status a11y_crawl(const a11y_crawl_config* config, a11y_fetch_fn fetch, void* user_data,
                                const char* out_path, a11y_crawl_summary* summary, char** diagnostics);

/* ---- embedding ------------------------------------------------------- */

typedef struct a11y_embedder a11y_embedder;
typedef struct a11y_features a11y_features;

/* spec: "hash", "hash:<dim>", "service:<url>", "local:<path>" or a
 * comma-separated list of these, concatenated in order. */
A11Y_API a11y_status a11y_embedder_create(const char* spec, uint64_t seed, a11y_embedder** out);
A11Y_API size_t a11y_embedder_dim(const a11y_embedder* embedder);
A11Y_API a11y_status a11y_embedder_embed(const a11y_embedder* embedder, const char* text, double* out,
                                         size_t capacity);
A11Y_API void a11y_embedder_free(a11y_embedder* embedder);

/* Embeds the cleaned text of every review (see a11y_preprocess_config). */
A11Y_API a11y_status a11y_features_compute(const a11y_embedder* embedder, const a11y_dataset* dataset,
                                           const a11y_preprocess_config* preprocess, a11y_features** out);
/* Loads rows for the dataset's review ids from an embeddings cache file. */
A11Y_API a11y_status a11y_features_load_cache(const char* path, const a11y_dataset* dataset,
                                              a11y_features** out);
A11Y_API a11y_status a11y_features_save_cache(const a11y_features* features, const char* path);
A11Y_API size_t a11y_features_rows(const a11y_features* features);
A11Y_API size_t a11y_features_dim(const a11y_features* features);
A11Y_API void a11y_features_free(a11y_features* features);

/* ---- classifier ------------------------------------------------------ */

typedef struct a11y_model a11y_model;

typedef struct a11y_train_config {
  size_t epochs;         /* 3 */
  double learning_rate;  /* 0.005 */
  size_t batch_size;     /* 32 */
  double val_fraction;   /* 0.1 */
  uint64_t seed;
  double adam_beta1;     /* 0.9 */
  double adam_beta2;     /* 0.999 */
  double adam_epsilon;   /* 1e-8 */
} a11y_train_config;

typedef struct a11y_epoch_stats {
  double train_loss;
  double val_accuracy; /* negative when there was no validation data */
} a11y_epoch_stats;

A11Y_API void a11y_train_config_init(a11y_train_config* config);
A11Y_API a11y_status a11y_model_init(uint64_t seed, size_t input_dim, a11y_model** out);
/* Trains a fresh model (initialized from config->seed) on labeled features.
 * history may be NULL; otherwise it must hold config->epochs entries. */
A11Y_API a11y_status a11y_model_train(const a11y_features* features, const a11y_dataset* dataset,
                                      const a11y_train_config* config, a11y_model** out,
                                      a11y_epoch_stats* history);
A11Y_API a11y_status a11y_model_save(const a11y_model* model, const char* path);
A11Y_API a11y_status a11y_model_load(const char* path, a11y_model** out);
A11Y_API size_t a11y_model_input_dim(const a11y_model* model);
A11Y_API void a11y_model_free(a11y_model* model);

/* ---- keywords -------------------------------------------------------- */

typedef struct a11y_keywords a11y_keywords;

A11Y_API a11y_status a11y_keywords_load(const char* dir, a11y_keywords** out);
A11Y_API a11y_status a11y_keywords_save(const a11y_keywords* keywords, const char* dir);
A11Y_API void a11y_keywords_free(a11y_keywords* keywords);
/* Ranks n-grams of the label-1 reviews against the label-0 reviews; the
 * result is a JSON array of {phrase, score, pos_freq, neg_freq}. */
A11Y_API a11y_status a11y_keywords_extract(const a11y_dataset* dataset, size_t max_n, size_t top_k, char** json_out);

/* ---- hybrid + evaluation --------------------------------------------- */

typedef enum a11y_variant {
  A11Y_VARIANT_HYBRID = 0,
  A11Y_VARIANT_NO_KEYWORDS = 1,
  A11Y_VARIANT_MODEL_ONLY = 2
} a11y_variant;

typedef struct a11y_hybrid_config {
  double confidence_threshold; /* 0.80 */
  int keywords_enabled;        /* 1 */
} a11y_hybrid_config;

typedef struct a11y_prediction {
  int label;
  double confidence;
  const char* decision_path; /* static string */
  char* matched_keywords;    /* '|'-separated; release with a11y_string_free */
  double p0;
  double p1;
} a11y_prediction;

typedef struct a11y_metrics {
  double accuracy;
  double recall;
  double precision;
  double f1;
  size_t n;
  size_t tp, fp, tn, fn;
  unsigned degenerate_flags; /* 1 precision, 2 recall, 4 f1 */
} a11y_metrics;

typedef struct a11y_predictions a11y_predictions;

A11Y_API void a11y_hybrid_config_init(a11y_hybrid_config* config);

A11Y_API a11y_status a11y_classify_text(const a11y_embedder* embedder, const a11y_model* model,
                                        const a11y_keywords* keywords, const a11y_preprocess_config* preprocess,
                                        const a11y_hybrid_config* config, const char* raw_text,
                                        a11y_prediction* out);

/* keywords may be NULL for A11Y_VARIANT_NO_KEYWORDS and MODEL_ONLY. */
A11Y_API a11y_status a11y_predict_dataset(const a11y_features* features, const a11y_dataset* dataset,
                                          const a11y_model* model, const a11y_keywords* keywords,
                                          const a11y_preprocess_config* preprocess,
                                          const a11y_hybrid_config* config, a11y_variant variant,
                                          a11y_predictions** out);
A11Y_API size_t a11y_predictions_size(const a11y_predictions* predictions);
/* One JSON object per line: {id, label, confidence, decision_path,
 * matched_keywords, p0, p1}. */
A11Y_API a11y_status a11y_predictions_to_jsonl(const a11y_predictions* predictions, char** out);
A11Y_API a11y_status a11y_predictions_save(const a11y_predictions* predictions, const char* path);
/* Requires a fully labeled dataset aligned with the predictions. */
A11Y_API a11y_status a11y_predictions_score(const a11y_predictions* predictions, const a11y_dataset* gold,
                                            a11y_metrics* out);
A11Y_API void a11y_predictions_free(a11y_predictions* predictions);

A11Y_API a11y_status a11y_metrics_from_counts(size_t tp, size_t fp, size_t tn, size_t fn, a11y_metrics* out);
A11Y_API a11y_status a11y_metrics_json(const a11y_metrics* metrics, char** out);
/* JSON {"hybrid":..., "no_keywords":..., "ablation":[...],
 * "reference_percent":[...]} (published rows, in percent)
 * and, when table_out is not NULL, the aligned plain-text tables. */
A11Y_API a11y_status a11y_ablation_report(const a11y_metrics* hybrid, const a11y_metrics* no_keywords,
                                          char** json_out, char** table_out);
/* Aligned table of one report next to the published reference rows. */
A11Y_API a11y_status a11y_metrics_table(const char* name, const a11y_metrics* metrics, char** out);

#ifdef __cplusplus
}
#endif

#endif /* A11YREV_A11YREV_H */
