#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "a11yrev/classifier.hpp"
#include "a11yrev/corpus.hpp"
#include "a11yrev/hybrid.hpp"

namespace a11yrev {

// Counts with label 1 (accessibility issue) as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> golds);

enum DegenerateFlag : std::uint8_t {
  kPrecisionUndefined = 1U << 0,
  kRecallUndefined = 1U << 1,
  kF1Undefined = 1U << 2,
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n = 0;
  ConfusionMatrix counts;
  // Bitwise OR of DegenerateFlag; each flagged metric is reported as 0.
  std::uint8_t degenerate_flags = 0;

  std::vector<std::string> flag_names() const;
};

MetricsReport metrics(const ConfusionMatrix& cm);

enum class Variant { Hybrid, NoKeywords, ModelOnly };

const char* to_string(Variant variant) noexcept;

// Normalized text of every review (cleaned from raw_text); throws Data when a
// review cleans to nothing.
std::vector<std::string> review_texts(const LabeledDataset& dataset, const Preprocessor& preprocessor);

// Row i of `features` is the embedding of texts[i].
std::vector<HybridPrediction> classify_texts(Variant variant, std::span<const std::string> texts,
                                             const Matrix& features, const MlpModel& model,
                                             const KeywordSets& keywords, HybridConfig config);

MetricsReport score_predictions(std::span<const HybridPrediction> predictions, const LabeledDataset& gold);

struct VariantResult {
  MetricsReport report;
  std::vector<HybridPrediction> predictions;
};

VariantResult evaluate_variant(Variant variant, const LabeledDataset& test, std::span<const std::string> texts,
                               const Matrix& features, const MlpModel& model, const KeywordSets& keywords,
                               const HybridConfig& config);

// Embeds the cleaned test texts with the pipeline's embedder first.
VariantResult evaluate_variant(Variant variant, const Pipeline& pipeline, const LabeledDataset& test);

struct AblationRow {
  std::string metric;
  double hybrid = 0.0;
  double no_keywords = 0.0;
  double delta = 0.0;
};

// Accuracy, Recall, Precision, F1 (table column order); delta = hybrid - no_keywords.
std::vector<AblationRow> ablation_report(const MetricsReport& hybrid, const MetricsReport& no_keywords);

struct ReferenceRow {
  const char* model;
  double accuracy;
  double recall;
  double precision;
  double f1;
};

// Published test-set results (percent) for context in reports.
std::span<const ReferenceRow> reference_rows();

std::string to_json(const MetricsReport& report);
std::string ablation_to_json(std::span<const AblationRow> rows);
std::string render_table(std::span<const std::pair<std::string, MetricsReport>> rows);
std::string render_ablation_table(std::span<const AblationRow> rows);

}  // namespace a11yrev
