#include "noiselab/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "noiselab/ops.hpp"

namespace noiselab {
namespace {

constexpr double kRowSumTolerance =
    sizeof(Scalar) == sizeof(double) ? 1e-9 : 1e-4;

}  // namespace

Tensor cross_entropy(const Tensor& distributions,
                     std::span<const std::size_t> targets,
                     LossDiagnostics* diagnostics) {
  const std::size_t k = distributions.cols();
  if (targets.size() != distributions.rows() || targets.empty()) {
    throw ShapeError("cross_entropy", distributions.shape().to_string() +
                                          " with " +
                                          std::to_string(targets.size()) +
                                          " targets");
  }
  for (std::size_t r = 0; r < distributions.rows(); ++r) {
    double total = 0;
    for (std::size_t c = 0; c < k; ++c) total += distributions.at(r, c);
    if (!(std::abs(total - 1.0) <= kRowSumTolerance)) {
      throw std::invalid_argument("cross_entropy: row " + std::to_string(r) +
                                  " sums to " + std::to_string(total));
    }
    if (targets[r] >= k) {
      throw std::invalid_argument("cross_entropy: target " +
                                  std::to_string(targets[r]) +
                                  " outside [0, " + std::to_string(k) + ")");
    }
    if (diagnostics && distributions.at(r, targets[r]) < kLogFloor) {
      ++diagnostics->clamped;
    }
  }
  return scale(mean(log(pick(distributions, targets), kLogFloor)), Scalar{-1});
}

Tensor absolute_error(const Tensor& predicted, const Tensor& target) {
  if (!(predicted.shape() == target.shape())) {
    throw ShapeError("absolute_error", predicted.shape().to_string() + " and " +
                                           target.shape().to_string());
  }
  return sum(abs(sub(predicted, target.requires_grad() ? target.detach() : target)));
}

}  // namespace noiselab
