#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "a11yrev/embedding.hpp"

namespace a11yrev {

inline constexpr std::size_t kLayerCount = 5;
using LayerDims = std::array<std::size_t, kLayerCount + 1>;

// 1152 -> 512 (ReLU) -> 128 (PReLU) -> 32 (ReLU) -> 8 (ReLU) -> 2 (identity).
inline constexpr LayerDims kDefaultLayerDims = {1152, 512, 128, 32, 8, 2};

enum class Activation { ReLU, PReLU, Identity };
inline constexpr std::array<Activation, kLayerCount> kActivations = {
    Activation::ReLU, Activation::PReLU, Activation::ReLU, Activation::ReLU, Activation::Identity};

const char* to_string(Activation activation) noexcept;

// Five fully connected layers. weights[i] has shape (dims[i+1], dims[i]).
// The activation pattern is fixed; only the widths vary (tests use a small
// instance).
struct MlpModel {
  LayerDims layer_dims = kDefaultLayerDims;
  std::array<Matrix, kLayerCount> weights;
  std::array<Vector, kLayerCount> biases;
  double prelu_alpha = 0.25;
  std::uint64_t seed = 0;

  std::size_t input_dim() const noexcept { return layer_dims.front(); }
  std::size_t parameter_count() const noexcept;

  // Shapes match layer_dims and every parameter is finite.
  void validate() const;

  bool operator==(const MlpModel& other) const;
};

// Weights uniform in +-1/sqrt(fan_in), zero biases, alpha 0.25. Parameters
// are rounded to float precision so saved models reload bit-exactly.
MlpModel init_model(std::uint64_t seed, const LayerDims& dims = kDefaultLayerDims);

using Logits = std::array<double, 2>;
using Probabilities = std::array<double, 2>;

Logits forward(const MlpModel& model, std::span<const double> x);
inline Logits forward(const MlpModel& model, const EmbeddingVector& x) { return forward(model, x.values); }

// Row-wise logits for a batch (n x 2).
Matrix forward_batch(const MlpModel& model, const Matrix& inputs);

Probabilities softmax(const Logits& logits);

struct ModelPrediction {
  int label = 0;
  double confidence = 0.5;
  Probabilities probabilities{0.5, 0.5};
};

// Argmax with ties going to label 0; confidence is the max probability.
ModelPrediction prediction_from_logits(const Logits& logits);
ModelPrediction predict(const MlpModel& model, std::span<const double> x);
inline ModelPrediction predict(const MlpModel& model, const EmbeddingVector& x) { return predict(model, x.values); }
std::vector<ModelPrediction> predict_batch(const MlpModel& model, const Matrix& inputs);

struct TrainConfig {
  std::size_t epochs = 3;
  double learning_rate = 0.005;
  std::size_t batch_size = 32;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  // Absent when the validation share rounds down to zero examples.
  std::optional<double> val_accuracy;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

struct TrainResult {
  MlpModel model;
  TrainHistory history;
};

// Gradients of the mean cross-entropy over a batch, laid out like MlpModel.
struct Gradients {
  std::array<Matrix, kLayerCount> weights;
  std::array<Vector, kLayerCount> biases;
  double prelu_alpha = 0.0;
};

// Mean cross-entropy of softmax(forward) against labels.
double mean_loss(const MlpModel& model, const Matrix& inputs, std::span<const int> labels);

// Returns the mean loss and writes gradients by backpropagation.
double loss_and_gradients(const MlpModel& model, const Matrix& inputs, std::span<const int> labels,
                          Gradients& grads);

// Seeded shuffle, the last val_fraction held out, per-epoch reshuffles of
// the rest, minibatches (final partial batch kept), Adam on every parameter
// including the PReLU slope. Training runs in double precision; the returned
// model is rounded to float precision.
TrainResult train(const MlpModel& model, const Matrix& inputs, std::span<const int> labels,
                  const TrainConfig& config);

inline constexpr char kModelMagic[6] = {'A', 'R', 'M', 'L', 'P', '1'};
inline constexpr int kModelFormatVersion = 1;

// Layout: magic "ARMLP1", u32 LE header length, JSON header, LE float32
// parameters (W1, b1, ..., W5, b5; row-major), u32 LE CRC32 of that blob.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);
std::string serialize_model(const MlpModel& model);
MlpModel deserialize_model(std::string_view bytes);

}  // namespace a11yrev
