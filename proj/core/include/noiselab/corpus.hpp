#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noiselab/evaluation.hpp"
#include "noiselab/labels.hpp"
#include "noiselab/tensor.hpp"
#include "noiselab/vocabulary.hpp"

namespace noiselab {

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<Label> labels;  // empty when unlabelled

  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  // Index of the first sentence of every document after a -DOCSTART- line.
  std::vector<std::size_t> document_starts;

  std::size_t token_count() const;
  bool labeled() const;
  std::vector<std::vector<std::string>> token_lists() const;
  LabelSequences label_sequences() const;

  bool operator==(const Corpus&) const = default;
};

// One token per line with whitespace-separated columns; the last column is
// the tag when there are at least two. B-/I- prefixes are stripped. Blank
// lines end sentences and -DOCSTART- lines mark document boundaries.
// Unknown tags throw std::invalid_argument naming the line.
Corpus parse_conll(std::string_view text, const LabelSet& labels);
// "token TAG" lines; unlabelled sentences get the token only.
std::string write_conll(const Corpus& corpus, const LabelSet& labels);

// Same tokens and boundaries, labels replaced.
Corpus relabel(const Corpus& corpus, const LabelSequences& labels);

struct Embeddings {
  Vocabulary vocabulary;
  Tensor table;  // (words + PAD + UNK) x dim, PAD and UNK rows zero

  std::size_t dim() const { return table.cols(); }
};

// Text vectors: a word followed by its floats on each line.
Embeddings parse_embeddings(std::string_view text,
                            std::optional<std::size_t> expected_dim = std::nullopt);
Embeddings load_embeddings(const std::filesystem::path& path,
                           std::optional<std::size_t> expected_dim = std::nullopt);
std::string write_embeddings(const Embeddings& embeddings);
// Seeded N(0, 1) rows for the given words.
Embeddings random_embeddings(std::vector<std::string> words, std::size_t dim,
                             std::uint64_t seed);

struct CleanSplit {
  Corpus clean;
  Corpus remainder;
};

// Whole sentences in seeded random order until the token count first reaches
// the budget.
CleanSplit sample_clean_subset(const Corpus& corpus, std::size_t word_budget,
                               std::uint64_t seed);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace noiselab
