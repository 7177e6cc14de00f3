#include "noiselab/labels.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace noiselab {

LabelSet LabelSet::conll() { return LabelSet({"O", "PER", "ORG", "LOC", "MISC"}); }

LabelSet::LabelSet(std::vector<std::string> classes) : classes_(std::move(classes)) {
  if (classes_.size() < 2) {
    throw std::invalid_argument("label set needs at least two classes");
  }
  if (std::set<std::string>(classes_.begin(), classes_.end()).size() !=
      classes_.size()) {
    throw std::invalid_argument("label set has duplicate classes");
  }
  auto it = std::find(classes_.begin(), classes_.end(), "O");
  if (it == classes_.end()) {
    throw std::invalid_argument("label set must contain the null class O");
  }
  outside_ = static_cast<Label>(it - classes_.begin());
}

std::optional<Label> LabelSet::find(std::string_view name) const {
  auto it = std::find(classes_.begin(), classes_.end(), name);
  if (it == classes_.end()) return std::nullopt;
  return static_cast<Label>(it - classes_.begin());
}

Label LabelSet::index(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw std::invalid_argument("unknown class '" + std::string(name) + "'");
}

}  // namespace noiselab
