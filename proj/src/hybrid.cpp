#include "a11yrev/hybrid.hpp"

#include <cmath>

#include "a11yrev/error.hpp"

namespace a11yrev {

void HybridConfig::validate() const {
  if (!(confidence_threshold > 0.5 && confidence_threshold <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "confidence threshold must lie in (0.5, 1]");
  }
}

const char* to_string(DecisionPath path) noexcept {
  switch (path) {
    case DecisionPath::ModelConfident:
      return "MODEL_CONFIDENT";
    case DecisionPath::KeywordAccessibility:
      return "KEYWORD_ACCESSIBILITY";
    case DecisionPath::KeywordDeveloper:
      return "KEYWORD_DEVELOPER";
    case DecisionPath::ModelFallback:
      return "MODEL_FALLBACK";
  }
  return "?";
}

HybridPrediction decide(const ModelPrediction& model_pred, std::string_view normalized_text,
                        const KeywordSets& sets, const HybridConfig& config) {
  config.validate();
  HybridPrediction out;
  out.label = model_pred.label;
  out.confidence = model_pred.confidence;
  out.model_probabilities = model_pred.probabilities;

  if (model_pred.confidence > config.confidence_threshold) {
    out.decision_path = DecisionPath::ModelConfident;
    return out;
  }
  if (config.keywords_enabled) {
    if (auto hits = match_keywords(normalized_text, sets.accessibility_terms); !hits.empty()) {
      out.label = 1;
      out.decision_path = DecisionPath::KeywordAccessibility;
      out.matched_keywords = std::move(hits);
      return out;
    }
    if (auto hits = match_keywords(normalized_text, sets.developer_terms); !hits.empty()) {
      out.label = 0;
      out.decision_path = DecisionPath::KeywordDeveloper;
      out.matched_keywords = std::move(hits);
      return out;
    }
  }
  out.decision_path = DecisionPath::ModelFallback;
  return out;
}

HybridPrediction classify_review(std::string_view raw_text, const Pipeline& pipeline) {
  if (raw_text.empty()) fail(ErrorCode::InvalidArgument, "review text is empty");
  const std::string text = pipeline.preprocessor.clean(raw_text);
  if (text.empty()) fail(ErrorCode::Data, "review is empty after normalization");
  const EmbeddingVector embedding = pipeline.embedder.embed(text);
  return decide(predict(pipeline.model, embedding), text, pipeline.keywords, pipeline.config);
}

}  // namespace a11yrev
