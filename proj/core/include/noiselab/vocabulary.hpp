#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace noiselab {

using TokenId = std::size_t;

// Word to row mapping for the embedding table. The two reserved rows PAD
// and UNK always sit after the regular words.
class Vocabulary {
 public:
  static constexpr std::string_view kPad = "<PAD>";
  static constexpr std::string_view kUnk = "<UNK>";

  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);

  // Number of regular words (excluding PAD/UNK).
  std::size_t word_count() const { return words_.size(); }
  // Rows of the embedding table, PAD and UNK included.
  std::size_t size() const { return words_.size() + 2; }
  TokenId pad() const { return words_.size(); }
  TokenId unk() const { return words_.size() + 1; }

  // Exact match, then lowercase fallback, then UNK.
  TokenId lookup(std::string_view word) const;
  const std::string& word(TokenId id) const;
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace noiselab
