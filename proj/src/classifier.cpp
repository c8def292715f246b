#include "a11yrev/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <zlib.h>

#include "a11yrev/error.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace a11yrev {
namespace {

double to_float_precision(double value) { return static_cast<double>(static_cast<float>(value)); }

template <typename Derived>
void round_to_float(Eigen::MatrixBase<Derived>& m) {
  m = m.unaryExpr([](double v) { return to_float_precision(v); });
}

void round_model(MlpModel& model) {
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    round_to_float(model.weights[i]);
    round_to_float(model.biases[i]);
  }
  model.prelu_alpha = to_float_precision(model.prelu_alpha);
}

void check_input(const MlpModel& model, std::size_t dim) {
  if (dim != model.input_dim()) {
    fail(ErrorCode::InvalidArgument, "input dimension " + std::to_string(dim) + " does not match model input " +
                                         std::to_string(model.input_dim()));
  }
}

void check_labels(std::span<const int> labels, Eigen::Index rows) {
  if (labels.size() != static_cast<std::size_t>(rows)) {
    fail(ErrorCode::InvalidArgument, "label count does not match the number of inputs");
  }
  for (int label : labels) {
    if (label != 0 && label != 1) fail(ErrorCode::InvalidArgument, "labels must be 0 or 1");
  }
}

// Pre-activations and activations of one forward pass over a batch.
struct Trace {
  std::array<Matrix, kLayerCount> pre;
  std::array<Matrix, kLayerCount + 1> post;
};

Matrix activate(Activation activation, const Matrix& pre, double alpha) {
  switch (activation) {
    case Activation::ReLU:
      return pre.cwiseMax(0.0);
    case Activation::PReLU:
      return pre.unaryExpr([alpha](double t) { return t >= 0.0 ? t : alpha * t; });
    case Activation::Identity:
      return pre;
  }
  return pre;
}

void run_forward(const MlpModel& model, const Matrix& inputs, Trace& trace) {
  trace.post[0] = inputs;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    trace.pre[i] = trace.post[i] * model.weights[i].transpose();
    trace.pre[i].rowwise() += model.biases[i].transpose();
    trace.post[i + 1] = activate(kActivations[i], trace.pre[i], model.prelu_alpha);
  }
}

// Row-wise softmax of an n x 2 logit matrix.
Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), 2);
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const auto p = softmax({logits(r, 0), logits(r, 1)});
    probs(r, 0) = p[0];
    probs(r, 1) = p[1];
  }
  return probs;
}

// -log p_y computed from logits via log-sum-exp.
double cross_entropy(double l0, double l1, int label) {
  const double top = std::max(l0, l1);
  const double lse = top + std::log(std::exp(l0 - top) + std::exp(l1 - top));
  return lse - (label == 1 ? l1 : l0);
}

struct AdamState {
  std::array<Matrix, kLayerCount> m_weights, v_weights;
  std::array<Vector, kLayerCount> m_biases, v_biases;
  double m_alpha = 0.0, v_alpha = 0.0;
  std::size_t step = 0;

  explicit AdamState(const MlpModel& model) {
    for (std::size_t i = 0; i < kLayerCount; ++i) {
      m_weights[i] = Matrix::Zero(model.weights[i].rows(), model.weights[i].cols());
      v_weights[i] = m_weights[i];
      m_biases[i] = Vector::Zero(model.biases[i].size());
      v_biases[i] = m_biases[i];
    }
  }

  void apply(MlpModel& model, const Gradients& g, const TrainConfig& c) {
    ++step;
    const double b1 = c.adam_beta1, b2 = c.adam_beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
    auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
      m = b1 * m + (1.0 - b1) * grad;
      v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
      param -= (c.learning_rate * (m / correction1).array() /
                ((v / correction2).array().sqrt() + c.adam_epsilon))
                   .matrix();
    };
    for (std::size_t i = 0; i < kLayerCount; ++i) {
      update(model.weights[i], m_weights[i], v_weights[i], g.weights[i]);
      update(model.biases[i], m_biases[i], v_biases[i], g.biases[i]);
    }
    m_alpha = b1 * m_alpha + (1.0 - b1) * g.prelu_alpha;
    v_alpha = b2 * v_alpha + (1.0 - b2) * g.prelu_alpha * g.prelu_alpha;
    model.prelu_alpha -= c.learning_rate * (m_alpha / correction1) / (std::sqrt(v_alpha / correction2) + c.adam_epsilon);
  }
};

Matrix gather_rows(const Matrix& inputs, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = inputs.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

void put_u32(std::string& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFFU));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

template <typename F>
void for_each_parameter(const MlpModel& model, F&& visit) {
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    const Matrix& w = model.weights[i];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) visit(w(r, c));
    }
    for (Eigen::Index r = 0; r < model.biases[i].size(); ++r) visit(model.biases[i](r));
  }
}

std::uint32_t crc_of(std::string_view blob) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(blob.data()), static_cast<uInt>(blob.size())));
}

}  // namespace

const char* to_string(Activation activation) noexcept {
  switch (activation) {
    case Activation::ReLU:
      return "relu";
    case Activation::PReLU:
      return "prelu";
    case Activation::Identity:
      return "identity";
  }
  return "?";
}

std::size_t MlpModel::parameter_count() const noexcept {
  std::size_t count = 0;
  for (std::size_t i = 0; i < kLayerCount; ++i) count += layer_dims[i + 1] * layer_dims[i] + layer_dims[i + 1];
  return count;
}

void MlpModel::validate() const {
  if (layer_dims.back() != 2) fail(ErrorCode::InvalidArgument, "output layer must have 2 units");
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    if (layer_dims[i] == 0) fail(ErrorCode::InvalidArgument, "layer widths must be positive");
    if (static_cast<std::size_t>(weights[i].rows()) != layer_dims[i + 1] ||
        static_cast<std::size_t>(weights[i].cols()) != layer_dims[i] ||
        static_cast<std::size_t>(biases[i].size()) != layer_dims[i + 1]) {
      fail(ErrorCode::InvalidArgument, "layer " + std::to_string(i + 1) + " shape does not match layer_dims");
    }
    if (!weights[i].allFinite() || !biases[i].allFinite()) {
      fail(ErrorCode::Data, "layer " + std::to_string(i + 1) + " has non-finite parameters");
    }
  }
  if (!std::isfinite(prelu_alpha)) fail(ErrorCode::Data, "PReLU slope is not finite");
}

bool MlpModel::operator==(const MlpModel& other) const {
  if (layer_dims != other.layer_dims || prelu_alpha != other.prelu_alpha || seed != other.seed) return false;
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    if (weights[i].rows() != other.weights[i].rows() || weights[i].cols() != other.weights[i].cols() ||
        biases[i].size() != other.biases[i].size()) {
      return false;
    }
    if (weights[i] != other.weights[i] || biases[i] != other.biases[i]) return false;
  }
  return true;
}

MlpModel init_model(std::uint64_t seed, const LayerDims& dims) {
  MlpModel model;
  model.layer_dims = dims;
  model.seed = seed;
  model.prelu_alpha = 0.25;
  detail::Rng rng(seed);
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    if (dims[i] == 0 || dims[i + 1] == 0) fail(ErrorCode::InvalidArgument, "layer widths must be positive");
    const auto rows = static_cast<Eigen::Index>(dims[i + 1]);
    const auto cols = static_cast<Eigen::Index>(dims[i]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[i]));
    Matrix w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        float value = static_cast<float>(rng.uniform(-bound, bound));
        // Rounding may step just past the bound.
        if (std::abs(static_cast<double>(value)) > bound) value = std::nextafter(value, 0.0f);
        w(r, c) = value;
      }
    }
    model.weights[i] = std::move(w);
    model.biases[i] = Vector::Zero(rows);
  }
  if (dims.back() != 2) fail(ErrorCode::InvalidArgument, "output layer must have 2 units");
  return model;
}

Logits forward(const MlpModel& model, std::span<const double> x) {
  check_input(model, x.size());
  Vector a = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    Vector pre = model.weights[i] * a + model.biases[i];
    switch (kActivations[i]) {
      case Activation::ReLU:
        a = pre.cwiseMax(0.0);
        break;
      case Activation::PReLU:
        a = pre.unaryExpr([&](double t) { return t >= 0.0 ? t : model.prelu_alpha * t; });
        break;
      case Activation::Identity:
        a = std::move(pre);
        break;
    }
  }
  return {a(0), a(1)};
}

Matrix forward_batch(const MlpModel& model, const Matrix& inputs) {
  check_input(model, static_cast<std::size_t>(inputs.cols()));
  Trace trace;
  run_forward(model, inputs, trace);
  return trace.post[kLayerCount];
}

Probabilities softmax(const Logits& logits) {
  if (!std::isfinite(logits[0]) || !std::isfinite(logits[1])) {
    fail(ErrorCode::InvalidArgument, "softmax: logits must be finite");
  }
  const double top = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - top);
  const double e1 = std::exp(logits[1] - top);
  const double sum = e0 + e1;
  return {e0 / sum, e1 / sum};
}

ModelPrediction prediction_from_logits(const Logits& logits) {
  ModelPrediction out;
  out.probabilities = softmax(logits);
  out.label = out.probabilities[1] > out.probabilities[0] ? 1 : 0;
  out.confidence = std::max(out.probabilities[0], out.probabilities[1]);
  return out;
}

ModelPrediction predict(const MlpModel& model, std::span<const double> x) {
  return prediction_from_logits(forward(model, x));
}

std::vector<ModelPrediction> predict_batch(const MlpModel& model, const Matrix& inputs) {
  check_input(model, static_cast<std::size_t>(inputs.cols()));
  // Row by row through forward() so batch and single predictions agree bitwise.
  std::vector<ModelPrediction> out;
  out.reserve(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
    out.push_back(predict(model, std::span<const double>(inputs.row(r).data(), static_cast<std::size_t>(inputs.cols()))));
  }
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorCode::InvalidArgument, "epochs must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorCode::InvalidArgument, "learning rate must be positive");
  }
  if (batch_size < 1) fail(ErrorCode::InvalidArgument, "batch size must be at least 1");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "validation fraction must lie in [0, 1)");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
      !(adam_epsilon > 0.0)) {
    fail(ErrorCode::InvalidArgument, "invalid Adam moments");
  }
}

double mean_loss(const MlpModel& model, const Matrix& inputs, std::span<const int> labels) {
  check_labels(labels, inputs.rows());
  if (inputs.rows() == 0) fail(ErrorCode::InvalidArgument, "mean_loss: empty batch");
  const Matrix logits = forward_batch(model, inputs);
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    total += cross_entropy(logits(r, 0), logits(r, 1), labels[static_cast<std::size_t>(r)]);
  }
  return total / static_cast<double>(logits.rows());
}

double loss_and_gradients(const MlpModel& model, const Matrix& inputs, std::span<const int> labels,
                          Gradients& grads) {
  check_input(model, static_cast<std::size_t>(inputs.cols()));
  check_labels(labels, inputs.rows());
  const Eigen::Index batch = inputs.rows();
  if (batch == 0) fail(ErrorCode::InvalidArgument, "empty batch");

  Trace trace;
  run_forward(model, inputs, trace);
  const Matrix& logits = trace.post[kLayerCount];

  double loss = 0.0;
  Matrix delta = softmax_rows(logits);
  for (Eigen::Index r = 0; r < batch; ++r) {
    const int label = labels[static_cast<std::size_t>(r)];
    loss += cross_entropy(logits(r, 0), logits(r, 1), label);
    delta(r, label) -= 1.0;
  }
  const double scale = 1.0 / static_cast<double>(batch);
  delta *= scale;
  loss *= scale;

  grads.prelu_alpha = 0.0;
  // delta holds dL/d(pre-activation) of the current layer.
  for (std::size_t k = kLayerCount; k-- > 0;) {
    grads.weights[k] = delta.transpose() * trace.post[k];
    grads.biases[k] = delta.colwise().sum().transpose();
    if (k == 0) break;
    Matrix upstream = delta * model.weights[k];
    const Matrix& pre = trace.pre[k - 1];
    switch (kActivations[k - 1]) {
      case Activation::ReLU:
        delta = upstream.cwiseProduct(pre.unaryExpr([](double t) { return t > 0.0 ? 1.0 : 0.0; }));
        break;
      case Activation::PReLU:
        grads.prelu_alpha = upstream.cwiseProduct(pre.unaryExpr([](double t) { return t < 0.0 ? t : 0.0; })).sum();
        delta = upstream.cwiseProduct(
            pre.unaryExpr([alpha = model.prelu_alpha](double t) { return t >= 0.0 ? 1.0 : alpha; }));
        break;
      case Activation::Identity:
        delta = std::move(upstream);
        break;
    }
  }
  return loss;
}

TrainResult train(const MlpModel& initial, const Matrix& inputs, std::span<const int> labels,
                  const TrainConfig& config) {
  config.validate();
  initial.validate();
  if (inputs.rows() == 0) fail(ErrorCode::InvalidArgument, "train: no training data");
  check_input(initial, static_cast<std::size_t>(inputs.cols()));
  check_labels(labels, inputs.rows());

  const auto n = static_cast<std::size_t>(inputs.rows());
  detail::Rng rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * config.val_fraction));
  std::vector<std::size_t> train_rows(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  const std::vector<std::size_t> val_rows(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());

  Matrix val_inputs = gather_rows(inputs, val_rows);
  std::vector<int> val_labels;
  for (std::size_t r : val_rows) val_labels.push_back(labels[r]);

  TrainResult result{initial, {}};
  MlpModel& model = result.model;
  AdamState adam(model);
  Gradients grads;
  std::vector<int> batch_labels;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(train_rows));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < train_rows.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, train_rows.size() - start);
      const auto rows = std::span(train_rows).subspan(start, count);
      const Matrix batch = gather_rows(inputs, rows);
      batch_labels.clear();
      for (std::size_t r : rows) batch_labels.push_back(labels[r]);
      loss_sum += loss_and_gradients(model, batch, batch_labels, grads) * static_cast<double>(count);
      adam.apply(model, grads, config);
    }
    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(train_rows.size());
    if (!val_rows.empty()) {
      const auto predictions = predict_batch(model, val_inputs);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i].label == val_labels[i];
      stats.val_accuracy = static_cast<double>(correct) / static_cast<double>(val_rows.size());
    }
    result.history.epochs.push_back(stats);
  }
  round_model(model);
  model.validate();
  return result;
}

std::string serialize_model(const MlpModel& model) {
  model.validate();
  nlohmann::ordered_json header;
  header["format_version"] = kModelFormatVersion;
  header["layer_dims"] = model.layer_dims;
  std::vector<std::string> activations;
  for (Activation a : kActivations) activations.emplace_back(to_string(a));
  header["activations"] = activations;
  header["prelu_alpha"] = model.prelu_alpha;
  header["seed"] = model.seed;
  const std::string header_text = header.dump();

  std::string blob;
  blob.reserve(model.parameter_count() * 4);
  for_each_parameter(model, [&](double value) { put_u32(blob, std::bit_cast<std::uint32_t>(static_cast<float>(value))); });

  std::string out(kModelMagic, sizeof kModelMagic);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  out += blob;
  put_u32(out, crc_of(blob));
  return out;
}

MlpModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < sizeof kModelMagic + 4 ||
      std::memcmp(bytes.data(), kModelMagic, sizeof kModelMagic) != 0) {
    fail(ErrorCode::Format, "corrupt model file: bad magic bytes");
  }
  std::size_t offset = sizeof kModelMagic;
  const std::uint32_t header_size = get_u32(bytes, offset);
  offset += 4;
  if (bytes.size() - offset < header_size) fail(ErrorCode::Checksum, "model file truncated inside its header");

  MlpModel model;
  try {
    const auto header = nlohmann::json::parse(bytes.substr(offset, header_size));
    const int version = header.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      fail(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) +
                                           " is not supported (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    const auto dims = header.at("layer_dims").get<std::vector<std::size_t>>();
    if (dims.size() != model.layer_dims.size()) fail(ErrorCode::Format, "corrupt model file: wrong layer count");
    std::copy(dims.begin(), dims.end(), model.layer_dims.begin());
    const auto activations = header.at("activations").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < kLayerCount; ++i) {
      if (activations.size() != kLayerCount || activations[i] != to_string(kActivations[i])) {
        fail(ErrorCode::Format, "corrupt model file: unsupported activation layout");
      }
    }
    model.prelu_alpha = header.at("prelu_alpha").get<double>();
    model.seed = header.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("corrupt model file: bad header: ") + e.what());
  }
  offset += header_size;
  for (std::size_t d : model.layer_dims) {
    if (d == 0 || d > (1U << 20)) fail(ErrorCode::Format, "corrupt model file: implausible layer width");
  }

  const std::size_t blob_size = model.parameter_count() * 4;
  if (bytes.size() - offset != blob_size + 4) {
    fail(ErrorCode::Checksum, "model file checksum mismatch: expected " + std::to_string(blob_size + 4) +
                                  " payload bytes, found " + std::to_string(bytes.size() - offset));
  }
  const std::string_view blob = bytes.substr(offset, blob_size);
  if (crc_of(blob) != get_u32(bytes, offset + blob_size)) fail(ErrorCode::Checksum, "model file checksum mismatch");

  std::size_t cursor = 0;
  auto next = [&] {
    const double value = std::bit_cast<float>(get_u32(blob, cursor));
    cursor += 4;
    return value;
  };
  for (std::size_t i = 0; i < kLayerCount; ++i) {
    const auto rows = static_cast<Eigen::Index>(model.layer_dims[i + 1]);
    const auto cols = static_cast<Eigen::Index>(model.layer_dims[i]);
    model.weights[i].resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) model.weights[i](r, c) = next();
    }
    model.biases[i].resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) model.biases[i](r) = next();
  }
  model.validate();
  return model;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write model '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::NotFound, "model not found: '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return deserialize_model(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace a11yrev
