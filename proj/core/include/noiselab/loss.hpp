#pragma once

#include <cstddef>
#include <span>

#include "noiselab/tensor.hpp"

namespace noiselab {

inline constexpr Scalar kLogFloor = Scalar(1e-12);

struct LossDiagnostics {
  // Number of target probabilities that hit the log floor.
  std::size_t clamped = 0;
};

// Mean over rows of -log p[r][target[r]] for a BxK matrix of distributions.
// Rows must sum to one; targets must lie in [0, K).
Tensor cross_entropy(const Tensor& distributions,
                     std::span<const std::size_t> targets,
                     LossDiagnostics* diagnostics = nullptr);

// Sum of componentwise absolute differences. target is treated as data.
Tensor absolute_error(const Tensor& predicted, const Tensor& target);

}  // namespace noiselab
