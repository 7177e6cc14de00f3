#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "noiselab/corpus.hpp"
#include "noiselab/labels.hpp"

namespace noiselab {

struct ToyCorpusConfig {
  std::size_t train_tokens = 20000;
  std::size_t dev_tokens = 3000;
  std::size_t test_tokens = 3000;
  std::uint64_t seed = 2024;
};

// Patterned English-like news sentences over a vocabulary of about two
// hundred words and the CoNLL classes, plus a matching gazetteer.
struct ToyCorpus {
  Corpus train;
  Corpus dev;
  Corpus test;
  // "surface<TAB>CLASS" lines covering part of the PER, ORG and LOC names.
  std::string gazetteer;
  std::string blocklist;
  // Every distinct token of the generator, sorted.
  std::vector<std::string> vocabulary;
};

// Requires the label set to contain O, PER, ORG, LOC and MISC.
ToyCorpus generate_toy_corpus(const ToyCorpusConfig& config,
                              const LabelSet& labels = LabelSet::conll());

}  // namespace noiselab
