#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace noiselab {

using Rng = std::mt19937_64;

// Seed of the named substream of a root seed. Substreams for different names
// (e.g. "init", "shuffle", "sample") are statistically independent.
std::uint64_t substream_seed(std::uint64_t root, std::string_view name);
std::uint64_t substream_seed(std::uint64_t root, std::string_view name,
                             std::uint64_t index);

inline Rng substream(std::uint64_t root, std::string_view name) {
  return Rng(substream_seed(root, name));
}
inline Rng substream(std::uint64_t root, std::string_view name,
                     std::uint64_t index) {
  return Rng(substream_seed(root, name, index));
}

}  // namespace noiselab
