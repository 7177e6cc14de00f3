#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noiselab/labels.hpp"
#include "noiselab/model.hpp"
#include "noiselab/tensor.hpp"

namespace noiselab {

// Surface forms of one or more tokens mapped to entity classes.
//
// Matching is case-sensitive and exact. At every position the longest entry
// wins; an entry listed under several classes resolves to the first of them
// in the priority order. Classes outside the priority order are never
// emitted, and blocklisted surface forms never match.
class Gazetteer {
 public:
  explicit Gazetteer(LabelSet labels,
                     std::vector<std::string> priority = {"PER", "LOC", "ORG"});

  // Reads "surface form<TAB>CLASS" lines. Blank lines and lines starting with
  // '#' are skipped; unknown classes throw with the line number.
  static Gazetteer parse(std::string_view text, LabelSet labels,
                         std::vector<std::string> priority = {"PER", "LOC", "ORG"});

  // English weekday and month names.
  static std::vector<std::string> default_blocklist();

  void add(std::string_view surface, std::string_view class_name);
  void block(std::string_view surface);
  // One surface form per line.
  void load_blocklist(std::string_view text);

  std::optional<Label> match(std::span<const std::string> tokens) const;
  // Labels every token; unmatched tokens get O.
  std::vector<Label> annotate(std::span<const std::string> sentence) const;

  const LabelSet& labels() const { return labels_; }
  std::size_t entry_count() const { return entries_.size(); }
  std::size_t max_entry_length() const { return max_length_; }

 private:
  LabelSet labels_;
  std::vector<Label> priority_;
  std::map<std::string, std::set<Label>> entries_;
  std::set<std::string> blocked_;
  std::size_t max_length_ = 0;
};

std::vector<std::vector<Label>> annotate(
    std::span<const std::vector<std::string>> sentences, const Gazetteer& gazetteer);

enum class ChannelKind { uniform, permutation, empirical };

struct NoiseChannelSpec {
  ChannelKind kind = ChannelKind::uniform;
  double flip_rate = 0.0;             // uniform
  std::vector<Label> permutation;     // permutation: class i -> permutation[i]
  std::vector<double> matrix;         // empirical: k x k, row-stochastic
  std::uint64_t seed = 0;

  static NoiseChannelSpec uniform(double rate, std::uint64_t seed = 0);
  static NoiseChannelSpec permuted(std::vector<Label> mapping, std::uint64_t seed = 0);
  static NoiseChannelSpec empirical(std::vector<double> matrix, std::uint64_t seed = 0);

  // Throws std::invalid_argument when the spec does not describe a channel
  // over k classes.
  void validate(std::size_t k) const;
  // p(z = j | y = i) as a k x k row-major matrix.
  std::vector<double> transition_matrix(std::size_t k) const;
};

// Strong PER/ORG/MISC -> O mass, LOC mostly kept, MISC never emitted.
// Needs the classes O, PER, ORG, LOC, MISC.
std::vector<double> gazetteer_like_channel(const LabelSet& labels);

std::vector<Label> apply_channel(std::span<const Label> labels,
                                 const NoiseChannelSpec& spec, std::size_t k);

// counts[i][j] = #{t : y_t = i and z_t = j}.
class ConfusionCounts {
 public:
  explicit ConfusionCounts(std::size_t k) : k_(k), counts_(k * k, 0) {}

  std::size_t classes() const { return k_; }
  std::size_t at(Label i, Label j) const { return counts_[i * k_ + j]; }
  void add(Label i, Label j, std::size_t n = 1) { counts_[i * k_ + j] += n; }
  std::size_t row_total(Label i) const;
  std::size_t total() const;

 private:
  std::size_t k_;
  std::vector<std::size_t> counts_;
};

ConfusionCounts estimate_confusion(std::span<const Label> clean,
                                   std::span<const Label> noisy, std::size_t k);

// b[i][j] = log((counts[i][j] + alpha) / (row_total[i] + k alpha)); the row
// softmax of b is the alpha-smoothed confusion row.
Tensor init_noise_weights(const ConfusionCounts& counts, double alpha = 1.0);

// b = I.
Tensor identity_init(std::size_t k);

// Predictions of a base model pretrained on noisy data stand in for clean
// labels; their confusion with the noisy labels initialises b.
Tensor goldberger_init(const ModelParameters& pretrained,
                       std::span<const WindowExample> noisy, double alpha = 1.0);

}  // namespace noiselab
