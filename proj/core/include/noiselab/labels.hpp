#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace noiselab {

using Label = std::size_t;

// Ordered class inventory. Indices are stable for a run and the null class
// "O" is always present.
class LabelSet {
 public:
  // O, PER, ORG, LOC, MISC.
  static LabelSet conll();

  explicit LabelSet(std::vector<std::string> classes);

  std::size_t size() const { return classes_.size(); }
  const std::string& name(Label index) const { return classes_.at(index); }
  const std::vector<std::string>& names() const { return classes_; }
  Label outside() const { return outside_; }

  std::optional<Label> find(std::string_view name) const;
  // Throws std::invalid_argument for unknown names.
  Label index(std::string_view name) const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> classes_;
  Label outside_ = 0;
};

}  // namespace noiselab
