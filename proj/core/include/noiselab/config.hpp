#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "noiselab/annotation.hpp"
#include "noiselab/labels.hpp"
#include "noiselab/training.hpp"

namespace noiselab {

// Where the automatic labels of the training corpus come from.
enum class NoiseSource { channel, gazetteer, file };

// Every knob of a run. Serialised as flat "key = value" lines; a saved
// config reproduces its run bit-identically.
struct ExperimentConfig {
  std::string variant = "noise-model";
  std::uint64_t seed = 1;
  std::size_t n_seeds = 5;
  std::size_t threads = 1;

  // Model.
  std::size_t embedding_dim = 16;
  std::string embedding_path;
  bool trainable_embeddings = false;
  std::size_t state_size = 300;
  std::size_t dense_size = 100;
  std::size_t cleaner_projection = 30;
  std::string pooling = "final";

  // Optimisation.
  std::size_t epochs = 40;
  std::size_t batch_size = 32;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double smoothing_alpha = 1.0;
  double noisy_factor = 1.0;
  std::size_t pretrain_epochs = 5;

  // Data. An empty train_path selects the generated toy corpus.
  std::vector<std::string> labels = {"O", "PER", "ORG", "LOC", "MISC"};
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::size_t clean_budget = 400;
  bool noisy_includes_clean = false;
  std::size_t toy_train_tokens = 20000;
  std::size_t toy_dev_tokens = 3000;
  std::size_t toy_test_tokens = 3000;
  std::uint64_t toy_seed = 2024;

  // Automatic labels.
  std::string noise_source = "channel";
  std::string noisy_path;
  std::string gazetteer_path;
  std::string blocklist_path;
  std::string channel = "gazetteer-like";
  double channel_rate = 0.2;
  std::string channel_permutation;
  std::string channel_matrix;
  std::uint64_t channel_seed = 7;

  // Small dimensions and a higher learning rate for the bundled toy corpus.
  static ExperimentConfig desk_scale();

  std::string to_text() const;
  // Unknown keys and malformed values throw std::invalid_argument.
  static ExperimentConfig from_text(std::string_view text);

  LabelSet label_set() const;
  NoiseSource noise_source_kind() const;
  TrainingConfig training() const;
  NoiseChannelSpec channel_spec() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Channel block on its own: channel, channel_rate, channel_permutation,
// channel_matrix and channel_seed keys. Permutations list class names or
// indices; matrix rows are separated by ';'. "gazetteer-like" selects the preset.
NoiseChannelSpec parse_channel_spec(std::string_view text, const LabelSet& labels);
NoiseChannelSpec make_channel_spec(std::string_view kind, double rate,
                                   std::string_view permutation, std::string_view matrix,
                                   std::uint64_t seed, const LabelSet& labels);

}  // namespace noiselab
