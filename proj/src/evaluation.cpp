#include "a11yrev/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "a11yrev/error.hpp"
#include "json.hpp"

namespace a11yrev {
namespace {

constexpr ReferenceRow kReference[] = {
    {"Fine-tuned BERT", 59.21, 54.79, 90.48, 68.26},
    {"Fine-tuned RoBERTa", 70.53, 64.46, 87.31, 74.17},
    {"Fine-tuned DistilBERT", 62.04, 62.04, 83.86, 71.32},
    {"Hybrid Model", 78.07, 82.70, 74.73, 78.52},
    {"Hybrid (No Keywords)", 74.67, 77.82, 74.06, 75.89},
};

double ratio(std::size_t num, std::size_t den) { return static_cast<double>(num) / static_cast<double>(den); }

std::string percent(double fraction) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f%%", fraction * 100.0);
  return buffer;
}

std::string signed_points(double delta) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%+.2f", delta * 100.0);
  return buffer;
}

std::string pad(const std::string& s, std::size_t width, bool right) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

std::string render(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> widths(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c) out += " | ";
      out += pad(cells[r][c], widths[c], c > 0);
    }
    out += '\n';
    if (r == 0) {
      for (std::size_t c = 0; c < widths.size(); ++c) {
        if (c) out += "-+-";
        out += std::string(widths[c], '-');
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> golds) {
  if (predictions.size() != golds.size()) {
    fail(ErrorCode::InvalidArgument, "confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                                         std::to_string(golds.size()) + " gold labels");
  }
  if (predictions.empty()) fail(ErrorCode::InvalidArgument, "confusion: no predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i];
    const int g = golds[i];
    if ((p != 0 && p != 1) || (g != 0 && g != 1)) fail(ErrorCode::InvalidArgument, "confusion: labels must be 0 or 1");
    if (p == 1) {
      ++(g == 1 ? cm.tp : cm.fp);
    } else {
      ++(g == 0 ? cm.tn : cm.fn);
    }
  }
  return cm;
}

std::vector<std::string> MetricsReport::flag_names() const {
  std::vector<std::string> names;
  if (degenerate_flags & kPrecisionUndefined) names.emplace_back("precision_undefined");
  if (degenerate_flags & kRecallUndefined) names.emplace_back("recall_undefined");
  if (degenerate_flags & kF1Undefined) names.emplace_back("f1_undefined");
  return names;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport report;
  report.n = cm.total();
  report.counts = cm;
  if (report.n == 0) fail(ErrorCode::InvalidArgument, "metrics: empty confusion matrix");
  report.accuracy = ratio(cm.tp + cm.tn, report.n);
  if (cm.tp + cm.fp > 0) {
    report.precision = ratio(cm.tp, cm.tp + cm.fp);
  } else {
    report.degenerate_flags |= kPrecisionUndefined;
  }
  if (cm.tp + cm.fn > 0) {
    report.recall = ratio(cm.tp, cm.tp + cm.fn);
  } else {
    report.degenerate_flags |= kRecallUndefined;
  }
  if (report.precision + report.recall > 0.0) {
    report.f1 = 2.0 * report.precision * report.recall / (report.precision + report.recall);
  } else {
    report.degenerate_flags |= kF1Undefined;
  }
  return report;
}

const char* to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::Hybrid:
      return "hybrid";
    case Variant::NoKeywords:
      return "no-keywords";
    case Variant::ModelOnly:
      return "model-only";
  }
  return "?";
}

std::vector<std::string> review_texts(const LabeledDataset& dataset, const Preprocessor& preprocessor) {
  std::vector<std::string> texts;
  texts.reserve(dataset.size());
  for (const Review& review : dataset.reviews) {
    std::string text = preprocessor.clean(review.raw_text);
    if (text.empty()) fail(ErrorCode::Data, "review '" + review.id + "' is empty after normalization");
    texts.push_back(std::move(text));
  }
  return texts;
}

std::vector<HybridPrediction> classify_texts(Variant variant, std::span<const std::string> texts,
                                             const Matrix& features, const MlpModel& model,
                                             const KeywordSets& keywords, HybridConfig config) {
  if (static_cast<std::size_t>(features.rows()) != texts.size()) {
    fail(ErrorCode::InvalidArgument, "feature rows do not match the number of texts");
  }
  config.keywords_enabled = variant == Variant::Hybrid;
  config.validate();
  const auto model_preds = predict_batch(model, features);
  std::vector<HybridPrediction> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (variant == Variant::ModelOnly) {
      HybridPrediction bare;
      bare.label = model_preds[i].label;
      bare.confidence = model_preds[i].confidence;
      bare.model_probabilities = model_preds[i].probabilities;
      bare.decision_path = bare.confidence > config.confidence_threshold ? DecisionPath::ModelConfident
                                                                         : DecisionPath::ModelFallback;
      out.push_back(std::move(bare));
    } else {
      out.push_back(decide(model_preds[i], texts[i], keywords, config));
    }
  }
  return out;
}

MetricsReport score_predictions(std::span<const HybridPrediction> predictions, const LabeledDataset& gold) {
  if (gold.empty()) fail(ErrorCode::Data, "evaluation set is empty");
  if (!gold.fully_labeled()) fail(ErrorCode::Data, "evaluation set contains unlabeled reviews");
  std::vector<int> labels, golds;
  for (const auto& p : predictions) labels.push_back(p.label);
  for (const auto& r : gold.reviews) golds.push_back(*r.label);
  return metrics(confusion(labels, golds));
}

VariantResult evaluate_variant(Variant variant, const LabeledDataset& test, std::span<const std::string> texts,
                               const Matrix& features, const MlpModel& model, const KeywordSets& keywords,
                               const HybridConfig& config) {
  if (test.empty()) fail(ErrorCode::Data, "evaluation set is empty");
  if (!test.fully_labeled()) fail(ErrorCode::Data, "evaluation set contains unlabeled reviews");
  if (texts.size() != test.size()) fail(ErrorCode::InvalidArgument, "texts do not match the evaluation set");
  VariantResult result;
  result.predictions = classify_texts(variant, texts, features, model, keywords, config);
  result.report = score_predictions(result.predictions, test);
  return result;
}

VariantResult evaluate_variant(Variant variant, const Pipeline& pipeline, const LabeledDataset& test) {
  const auto texts = review_texts(test, pipeline.preprocessor);
  const Matrix features = pipeline.embedder.embed_batch(texts);
  return evaluate_variant(variant, test, texts, features, pipeline.model, pipeline.keywords, pipeline.config);
}

std::vector<AblationRow> ablation_report(const MetricsReport& hybrid, const MetricsReport& no_keywords) {
  if (hybrid.n != no_keywords.n) {
    fail(ErrorCode::InvalidArgument, "ablation: reports cover different test sets (n=" + std::to_string(hybrid.n) +
                                         " vs n=" + std::to_string(no_keywords.n) + ")");
  }
  auto row = [](const char* name, double h, double k) { return AblationRow{name, h, k, h - k}; };
  return {
      row("accuracy", hybrid.accuracy, no_keywords.accuracy),
      row("recall", hybrid.recall, no_keywords.recall),
      row("precision", hybrid.precision, no_keywords.precision),
      row("f1", hybrid.f1, no_keywords.f1),
  };
}

std::span<const ReferenceRow> reference_rows() { return kReference; }

std::string to_json(const MetricsReport& report) {
  nlohmann::ordered_json object;
  object["n"] = report.n;
  object["accuracy"] = report.accuracy;
  object["recall"] = report.recall;
  object["precision"] = report.precision;
  object["f1"] = report.f1;
  object["confusion"] = {{"tp", report.counts.tp}, {"fp", report.counts.fp}, {"tn", report.counts.tn},
                         {"fn", report.counts.fn}};
  object["degenerate_flags"] = report.flag_names();
  return object.dump();
}

std::string ablation_to_json(std::span<const AblationRow> rows) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json item;
    item["metric"] = r.metric;
    item["hybrid"] = r.hybrid;
    item["no_keywords"] = r.no_keywords;
    item["delta"] = r.delta;
    array.push_back(std::move(item));
  }
  return array.dump();
}

std::string render_table(std::span<const std::pair<std::string, MetricsReport>> rows) {
  std::vector<std::vector<std::string>> cells{{"Classification Model", "Accuracy", "Recall", "Precision", "F1"}};
  for (const auto& [name, r] : rows) {
    cells.push_back({name, percent(r.accuracy), percent(r.recall), percent(r.precision), percent(r.f1)});
  }
  return render(cells);
}

std::string render_ablation_table(std::span<const AblationRow> rows) {
  std::vector<std::vector<std::string>> cells{{"Metric", "Hybrid", "No Keywords", "Delta (pts)"}};
  for (const auto& r : rows) cells.push_back({r.metric, percent(r.hybrid), percent(r.no_keywords), signed_points(r.delta)});
  return render(cells);
}

}  // namespace a11yrev
