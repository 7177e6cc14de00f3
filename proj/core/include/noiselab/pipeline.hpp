#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "noiselab/annotation.hpp"
#include "noiselab/config.hpp"
#include "noiselab/corpus.hpp"
#include "noiselab/training.hpp"
#include "noiselab/vocabulary.hpp"

namespace noiselab {

// Gold corpora and automatic training labels for one experiment.
struct ExperimentCorpora {
  LabelSet labels = LabelSet::conll();
  Corpus train;
  Corpus dev;
  Corpus test;
  LabelSequences train_noisy;  // aligned with train
};

// The toy corpus when train_path is empty, files otherwise. Automatic labels
// come from the configured noise source.
ExperimentCorpora load_corpora(const ExperimentConfig& config);

// The configured gazetteer, or the toy one when no path is given. The default
// weekday/month blocklist always applies, extended by blocklist_path.
Gazetteer load_gazetteer(const ExperimentConfig& config, const LabelSet& labels);

// Applies the configured channel to every training token in one pass.
LabelSequences simulate_noise(const Corpus& corpus, const NoiseChannelSpec& spec,
                              std::size_t k);

struct PreparedExperiment {
  ExperimentPool pool;
  Vocabulary vocabulary;
};

// Embedding file when configured, otherwise seeded random vectors for every
// word of the three splits.
PreparedExperiment prepare_experiment(const ExperimentConfig& config);
PreparedExperiment prepare_experiment(const ExperimentConfig& config,
                                      const ExperimentCorpora& corpora);

// C sampled with the config's root seed.
SplitDataset split_experiment(const PreparedExperiment& prepared,
                              const ExperimentConfig& config);

std::vector<TokenId> token_ids(const Vocabulary& vocabulary,
                               const std::vector<std::string>& tokens);

// Everything needed to predict again: the run's config, its vocabulary and
// embedding table, and the selected weights.
struct Checkpoint {
  ExperimentConfig config;
  Vocabulary vocabulary;
  Tensor embeddings;
  TrainedModel model;
};

std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(std::string_view text);

// Line-delimited metric records.
std::string epoch_record_json(const TrialResult& trial, const EpochRecord& record);
std::string trial_result_json(const TrialResult& trial, const LabelSet& labels);

// Predicted label sequences of a base model for a labelled corpus.
LabelSequences predict_corpus(const ModelParameters& params, const Vocabulary& vocabulary,
                              const Corpus& corpus);

}  // namespace noiselab
