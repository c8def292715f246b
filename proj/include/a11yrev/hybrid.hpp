#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "a11yrev/classifier.hpp"
#include "a11yrev/embedding.hpp"
#include "a11yrev/keywords.hpp"
#include "a11yrev/preprocess.hpp"

namespace a11yrev {

struct HybridConfig {
  // The model label is kept outright only when confidence is strictly above
  // this value.
  double confidence_threshold = 0.80;
  bool keywords_enabled = true;

  void validate() const;
};

enum class DecisionPath { ModelConfident, KeywordAccessibility, KeywordDeveloper, ModelFallback };

const char* to_string(DecisionPath path) noexcept;

struct HybridPrediction {
  int label = 0;
  double confidence = 0.5;
  DecisionPath decision_path = DecisionPath::ModelFallback;
  std::vector<std::string> matched_keywords;
  Probabilities model_probabilities{0.5, 0.5};
};

// Confident model -> model label. Otherwise an accessibility keyword forces
// 1, else a developer keyword forces 0, else the model label stands.
HybridPrediction decide(const ModelPrediction& model_pred, std::string_view normalized_text,
                        const KeywordSets& sets, const HybridConfig& config);

// Everything needed to classify one raw review. The referenced objects must
// outlive the pipeline.
struct Pipeline {
  const Preprocessor& preprocessor;
  const ConcatEmbedder& embedder;
  const MlpModel& model;
  const KeywordSets& keywords;
  HybridConfig config;
};

// clean -> embed -> predict -> decide. Throws Data when nothing is left of the
// review after normalization.
HybridPrediction classify_review(std::string_view raw_text, const Pipeline& pipeline);

}  // namespace a11yrev
