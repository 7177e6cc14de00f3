#include "noiselab/model.hpp"

#include <cmath>
#include <string>

#include "noiselab/ops.hpp"

namespace noiselab {
namespace {

Tensor glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<Scalar> values(rows * cols);
  for (Scalar& v : values) v = static_cast<Scalar>(dist(rng));
  return Tensor::from({rows, cols}, std::move(values), true);
}

LstmWeights init_lstm(std::size_t input, std::size_t state, Rng& rng) {
  LstmWeights w;
  w.input = glorot(input, 4 * state, rng);
  w.recurrent = glorot(state, 4 * state, rng);
  std::vector<Scalar> bias(4 * state, Scalar{0});
  // Forget gate starts open.
  for (std::size_t j = state; j < 2 * state; ++j) bias[j] = Scalar{1};
  w.bias = Tensor::from({1, 4 * state}, std::move(bias), true);
  return w;
}

struct LstmState {
  Tensor hidden;
  Tensor cell;
};

LstmState lstm_step(const LstmWeights& w, std::size_t state, const Tensor& x,
                    const LstmState* previous) {
  Tensor gates = matmul(x, w.input);
  if (previous) gates = add(gates, matmul(previous->hidden, w.recurrent));
  gates = add(gates, w.bias);
  Tensor in = sigmoid(slice_cols(gates, 0, state));
  Tensor candidate = tanh(slice_cols(gates, 2 * state, state));
  Tensor out = sigmoid(slice_cols(gates, 3 * state, state));
  Tensor cell = mul(in, candidate);
  if (previous) {
    Tensor forget = sigmoid(slice_cols(gates, state, state));
    cell = add(mul(forget, previous->cell), cell);
  }
  return {mul(out, tanh(cell)), cell};
}

void check_dims(const ModelParameters& p) {
  const ModelDims& d = p.dims;
  if (p.embeddings.cols() != d.embedding_dim) {
    throw ShapeError("model", "embedding table " + p.embeddings.shape().to_string() +
                                  " vs embedding_dim " +
                                  std::to_string(d.embedding_dim));
  }
  if (d.num_classes < 2) throw std::invalid_argument("model needs at least two classes");
}

std::vector<Tensor> copy_leaves(const std::vector<Tensor>& leaves) {
  std::vector<Tensor> out;
  out.reserve(leaves.size());
  for (const Tensor& t : leaves) out.push_back(t.clone());
  return out;
}

}  // namespace

Label WindowExample::training_label() const {
  const auto& label = source == Source::clean ? clean_label : noisy_label;
  if (!label) {
    throw std::logic_error(source == Source::clean
                               ? "clean example without label y"
                               : "noisy example without label z");
  }
  return *label;
}

ModelParameters ModelParameters::initialize(const ModelDims& dims,
                                            const Tensor& embeddings, Rng& rng) {
  ModelParameters p;
  p.dims = dims;
  p.embeddings = dims.trainable_embeddings
                     ? Tensor::from(embeddings.shape(),
                                    {embeddings.values().begin(), embeddings.values().end()},
                                    true)
                     : embeddings;
  check_dims(p);
  p.forward = init_lstm(dims.embedding_dim, dims.state_size, rng);
  p.backward = init_lstm(dims.embedding_dim, dims.state_size, rng);
  p.dense_weight = glorot(dims.feature_size(), dims.dense_size, rng);
  p.dense_bias = Tensor::zeros({1, dims.dense_size}, true);
  p.output_weight = glorot(dims.dense_size, dims.num_classes, rng);
  p.output_bias = Tensor::zeros({1, dims.num_classes}, true);
  return p;
}

std::vector<Tensor> ModelParameters::trainable() const {
  std::vector<Tensor> out{forward.input,  forward.recurrent, forward.bias,
                          backward.input, backward.recurrent, backward.bias,
                          dense_weight,   dense_bias,        output_weight,
                          output_bias};
  if (embeddings.requires_grad()) out.insert(out.begin(), embeddings);
  return out;
}

ModelParameters ModelParameters::snapshot() const {
  ModelParameters copy = *this;
  if (embeddings.requires_grad()) copy.embeddings = embeddings.clone();
  auto fresh = copy_leaves({forward.input, forward.recurrent, forward.bias,
                            backward.input, backward.recurrent, backward.bias,
                            dense_weight, dense_bias, output_weight, output_bias});
  copy.forward = {fresh[0], fresh[1], fresh[2]};
  copy.backward = {fresh[3], fresh[4], fresh[5]};
  copy.dense_weight = fresh[6];
  copy.dense_bias = fresh[7];
  copy.output_weight = fresh[8];
  copy.output_bias = fresh[9];
  return copy;
}

void ModelParameters::load_values(const ModelParameters& other) {
  auto mine = trainable();
  auto theirs = other.trainable();
  if (mine.size() != theirs.size()) {
    throw std::invalid_argument("load_values: parameter sets differ");
  }
  for (std::size_t i = 0; i < mine.size(); ++i) assign_values(mine[i], theirs[i]);
}

NoiseMatrix NoiseMatrix::learnable(const Tensor& weights) {
  if (weights.rows() != weights.cols() || weights.rows() < 2) {
    throw ShapeError("noise_matrix", "b must be square k x k, got " +
                                         weights.shape().to_string());
  }
  NoiseMatrix m;
  m.weights_ = Tensor::from(weights.shape(),
                            {weights.values().begin(), weights.values().end()}, true);
  return m;
}

NoiseMatrix NoiseMatrix::fixed(const Tensor& theta) {
  if (theta.rows() != theta.cols()) {
    throw ShapeError("noise_matrix", "theta must be square, got " +
                                         theta.shape().to_string());
  }
  NoiseMatrix m;
  m.weights_ = theta.detach();
  m.fixed_ = true;
  return m;
}

Tensor NoiseMatrix::theta() const {
  return fixed_ ? weights_ : theta_from_b(weights_);
}

std::vector<Scalar> NoiseMatrix::theta_values() const {
  Tensor t = fixed_ ? weights_ : theta_from_b(weights_.detach());
  return {t.values().begin(), t.values().end()};
}

Tensor theta_from_b(const Tensor& b) { return softmax_rows(b); }

CleaningNetwork CleaningNetwork::initialize(const ModelDims& dims, Rng& rng) {
  CleaningNetwork c;
  c.projection_weight = glorot(dims.feature_size(), dims.cleaner_projection, rng);
  c.projection_bias = Tensor::zeros({1, dims.cleaner_projection}, true);
  c.combiner_weight =
      glorot(dims.cleaner_projection + dims.num_classes, dims.num_classes, rng);
  c.combiner_bias = Tensor::zeros({1, dims.num_classes}, true);
  return c;
}

std::vector<Tensor> CleaningNetwork::trainable() const {
  return {projection_weight, projection_bias, combiner_weight, combiner_bias};
}

CleaningNetwork CleaningNetwork::snapshot() const {
  auto fresh = copy_leaves(trainable());
  return {fresh[0], fresh[1], fresh[2], fresh[3]};
}

Tensor encode(const ModelParameters& params, std::span<const TokenWindow> windows) {
  check_dims(params);
  const std::size_t state = params.dims.state_size;
  std::array<Tensor, kWindowSize> inputs;
  std::vector<std::size_t> ids(windows.size());
  for (std::size_t t = 0; t < kWindowSize; ++t) {
    for (std::size_t b = 0; b < windows.size(); ++b) ids[b] = windows[b][t];
    inputs[t] = index_select(params.embeddings, ids);
  }

  std::array<Tensor, kWindowSize> fwd, bwd;
  std::optional<LstmState> state_f, state_b;
  for (std::size_t t = 0; t < kWindowSize; ++t) {
    state_f = lstm_step(params.forward, state, inputs[t], state_f ? &*state_f : nullptr);
    fwd[t] = state_f->hidden;
    const std::size_t r = kWindowSize - 1 - t;
    state_b = lstm_step(params.backward, state, inputs[r], state_b ? &*state_b : nullptr);
    bwd[r] = state_b->hidden;
  }
  if (params.dims.pooling == Pooling::center) {
    return concat_cols({fwd[kContextWidth], bwd[kContextWidth]});
  }
  return concat_cols({fwd[kWindowSize - 1], bwd[0]});
}

Tensor classify(const ModelParameters& params, const Tensor& features) {
  Tensor hidden = relu(add(matmul(features, params.dense_weight), params.dense_bias));
  return softmax_rows(add(matmul(hidden, params.output_weight), params.output_bias));
}

Tensor base_forward(const ModelParameters& params,
                    std::span<const TokenWindow> windows) {
  return classify(params, encode(params, windows));
}

Tensor apply_noise(const Tensor& base_distribution, const Tensor& theta) {
  return matmul(base_distribution, theta);
}

Tensor noisy_forward(const ModelParameters& params,
                     std::span<const TokenWindow> windows, const NoiseMatrix& noise) {
  if (noise.classes() != params.dims.num_classes) {
    throw ShapeError("noisy_forward", "noise matrix " +
                                          noise.weights().shape().to_string() +
                                          " for " +
                                          std::to_string(params.dims.num_classes) +
                                          " classes");
  }
  return apply_noise(base_forward(params, windows), noise.theta());
}

Tensor cleaning_forward(const ModelParameters& params, const CleaningNetwork& cleaner,
                        std::span<const TokenWindow> windows,
                        const Tensor& noisy_onehot, bool through_features) {
  if (noisy_onehot.rows() != windows.size() ||
      noisy_onehot.cols() != params.dims.num_classes) {
    throw ShapeError("cleaning_forward", "noisy labels " +
                                             noisy_onehot.shape().to_string());
  }
  Tensor features = encode(params, windows);
  if (!through_features) features = features.detach();
  Tensor projected =
      add(matmul(features, cleaner.projection_weight), cleaner.projection_bias);
  Tensor combined = add(matmul(concat_cols({projected, noisy_onehot}),
                               cleaner.combiner_weight),
                        cleaner.combiner_bias);
  return clip(add(combined, noisy_onehot), Scalar{0}, Scalar{1});
}

Tensor one_hot(std::span<const Label> labels, std::size_t classes) {
  Tensor out = Tensor::zeros({labels.size(), classes});
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] >= classes) {
      throw std::out_of_range("one_hot: label " + std::to_string(labels[r]) +
                              " outside " + std::to_string(classes) + " classes");
    }
    out.at(r, labels[r]) = Scalar{1};
  }
  return out;
}

Label argmax(std::span<const Scalar> values) {
  Label best = 0;
  for (Label i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<Label> predict(const ModelParameters& params,
                           std::span<const TokenWindow> windows,
                           std::size_t batch_size) {
  NoGradGuard no_grad;
  std::vector<Label> out;
  out.reserve(windows.size());
  const std::size_t k = params.dims.num_classes;
  for (std::size_t begin = 0; begin < windows.size(); begin += batch_size) {
    const std::size_t n = std::min(batch_size, windows.size() - begin);
    Tensor probs = base_forward(params, windows.subspan(begin, n));
    auto v = probs.values();
    for (std::size_t r = 0; r < n; ++r) out.push_back(argmax(v.subspan(r * k, k)));
  }
  return out;
}

std::vector<TokenWindow> windows_of(std::span<const WindowExample> examples) {
  std::vector<TokenWindow> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.tokens);
  return out;
}

}  // namespace noiselab
