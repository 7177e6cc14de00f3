#include "noiselab/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace noiselab {
namespace {

double evaluate(const std::function<Tensor()>& expression) {
  const double value = static_cast<double>(expression().item());
  if (!std::isfinite(value)) {
    throw NumericError("gradient_check: expression evaluated to " +
                       std::to_string(value));
  }
  return value;
}

}  // namespace

double gradient_check(const std::function<Tensor()>& expression,
                      Tensor parameter, double h) {
  if constexpr (!std::is_same_v<Scalar, double>) {
    throw std::logic_error("gradient_check requires 64-bit scalars");
  }
  if (!(h >= 1e-6 && h <= 1e-4)) {
    throw std::invalid_argument("gradient_check: step " + std::to_string(h) +
                                " outside [1e-6, 1e-4]");
  }
  parameter.zero_grad();
  expression().backward();
  std::vector<double> analytic(parameter.grad().begin(), parameter.grad().end());
  parameter.zero_grad();

  double worst = 0.0;
  auto values = parameter.mutable_values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(analytic[i])) {
      throw NumericError("gradient_check: non-finite analytic gradient at " +
                         std::to_string(i));
    }
    const Scalar original = values[i];
    values[i] = original + static_cast<Scalar>(h);
    const double plus = evaluate(expression);
    values[i] = original - static_cast<Scalar>(h);
    const double minus = evaluate(expression);
    values[i] = original;
    const double numeric = (plus - minus) / (2.0 * h);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-12});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace noiselab
