#include "noiselab/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace noiselab {

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  index_.reserve(words_.size());
  for (TokenId i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw std::invalid_argument("duplicate vocabulary entry '" + words_[i] + "'");
    }
  }
}

TokenId Vocabulary::lookup(std::string_view word) const {
  if (auto it = index_.find(std::string(word)); it != index_.end()) return it->second;
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (auto it = index_.find(lower); it != index_.end()) return it->second;
  return unk();
}

const std::string& Vocabulary::word(TokenId id) const {
  static const std::string pad_word(kPad), unk_word(kUnk);
  if (id < words_.size()) return words_[id];
  if (id == pad()) return pad_word;
  if (id == unk()) return unk_word;
  throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary");
}

}  // namespace noiselab
