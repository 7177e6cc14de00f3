#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "noiselab/labels.hpp"
#include "noiselab/random.hpp"
#include "noiselab/tensor.hpp"
#include "noiselab/vocabulary.hpp"

namespace noiselab {

inline constexpr std::size_t kContextWidth = 3;
inline constexpr std::size_t kWindowSize = 2 * kContextWidth + 1;

using TokenWindow = std::array<TokenId, kWindowSize>;

// Target token with kContextWidth neighbours on each side; positions outside
// the sentence hold `pad`.
template <typename T>
std::array<T, kWindowSize> build_window(std::span<const T> sentence,
                                        std::size_t target, const T& pad) {
  if (sentence.empty()) throw std::invalid_argument("build_window: empty sentence");
  if (target >= sentence.size()) {
    throw std::out_of_range("build_window: target outside sentence");
  }
  std::array<T, kWindowSize> window;
  for (std::size_t k = 0; k < kWindowSize; ++k) {
    const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(target + k) -
                               static_cast<std::ptrdiff_t>(kContextWidth);
    window[k] = (pos < 0 || pos >= static_cast<std::ptrdiff_t>(sentence.size()))
                    ? pad
                    : sentence[static_cast<std::size_t>(pos)];
  }
  return window;
}

enum class Source { clean, noisy };

struct WindowExample {
  TokenWindow tokens{};
  std::optional<Label> clean_label;  // y
  std::optional<Label> noisy_label;  // z
  Source source = Source::clean;

  // y for clean examples, z for noisy ones.
  Label training_label() const;
};

enum class Pooling {
  final_states,  // last forward state ++ last backward state
  center,        // both directions' states at the target position
};

struct ModelDims {
  std::size_t embedding_dim = 300;
  std::size_t state_size = 300;
  std::size_t dense_size = 100;
  std::size_t num_classes = 5;
  std::size_t cleaner_projection = 30;
  Pooling pooling = Pooling::final_states;
  bool trainable_embeddings = false;

  std::size_t feature_size() const { return 2 * state_size; }
};

// Gate columns are ordered input, forget, candidate, output.
struct LstmWeights {
  Tensor input;      // E x 4H
  Tensor recurrent;  // H x 4H
  Tensor bias;       // 1 x 4H
};

// Embedding -> BiLSTM -> dense ReLU -> softmax.
struct ModelParameters {
  ModelDims dims;
  Tensor embeddings;  // V x E, shared when frozen
  LstmWeights forward;
  LstmWeights backward;
  Tensor dense_weight;   // 2H x D
  Tensor dense_bias;     // 1 x D
  Tensor output_weight;  // D x K, the softmax weights u
  Tensor output_bias;    // 1 x K

  static ModelParameters initialize(const ModelDims& dims, const Tensor& embeddings,
                                    Rng& rng);

  std::vector<Tensor> trainable() const;
  // Copy whose trainable tensors are independent of this one.
  ModelParameters snapshot() const;
  void load_values(const ModelParameters& other);
};

// Learnable weights b with theta = row-softmax(b), or a fixed channel.
class NoiseMatrix {
 public:
  NoiseMatrix() = default;
  static NoiseMatrix learnable(const Tensor& weights);
  static NoiseMatrix fixed(const Tensor& theta);

  // theta as a graph node, recomputed from b on every call.
  Tensor theta() const;
  std::vector<Scalar> theta_values() const;
  const Tensor& weights() const { return weights_; }
  Tensor& weights() { return weights_; }
  bool trainable() const { return !fixed_; }
  std::size_t classes() const { return weights_.rows(); }

 private:
  Tensor weights_;
  bool fixed_ = false;
};

// theta[i][j] = exp(b[i][j]) / sum_l exp(b[i][l]).
Tensor theta_from_b(const Tensor& b);

// Projection of BiLSTM features plus a linear combiner with skip connection
// from the noisy label, clipped to [0, 1].
struct CleaningNetwork {
  Tensor projection_weight;  // 2H x P
  Tensor projection_bias;    // 1 x P
  Tensor combiner_weight;    // (P + K) x K
  Tensor combiner_bias;      // 1 x K

  static CleaningNetwork initialize(const ModelDims& dims, Rng& rng);
  std::vector<Tensor> trainable() const;
  CleaningNetwork snapshot() const;
};

// B x 2H window encodings.
Tensor encode(const ModelParameters& params, std::span<const TokenWindow> windows);
// B x K class distributions from encodings.
Tensor classify(const ModelParameters& params, const Tensor& features);
// p(y | x; w).
Tensor base_forward(const ModelParameters& params,
                    std::span<const TokenWindow> windows);
// p(z = j | x) = sum_i theta(i, j) p(y = i | x).
Tensor noisy_forward(const ModelParameters& params,
                     std::span<const TokenWindow> windows, const NoiseMatrix& noise);
Tensor apply_noise(const Tensor& base_distribution, const Tensor& theta);
// clip(combiner(projection(features) ++ onehot) + onehot, 0, 1). Gradients
// stop at the features unless `through_features` is set.
Tensor cleaning_forward(const ModelParameters& params, const CleaningNetwork& cleaner,
                        std::span<const TokenWindow> windows,
                        const Tensor& noisy_onehot, bool through_features = false);

Tensor one_hot(std::span<const Label> labels, std::size_t classes);

// Lowest index wins ties.
Label argmax(std::span<const Scalar> values);
// Argmax of base_forward; the noise layer never participates.
std::vector<Label> predict(const ModelParameters& params,
                           std::span<const TokenWindow> windows,
                           std::size_t batch_size = 256);

std::vector<TokenWindow> windows_of(std::span<const WindowExample> examples);

}  // namespace noiselab
