#pragma once

#include <functional>

#include "noiselab/tensor.hpp"

namespace noiselab {

// Compares the reverse-mode gradient of a scalar expression with respect to
// one parameter against central differences. `expression` must rebuild the
// graph from the parameter's current values on every call.
//
// Returns max_i |analytic - numeric| / max(|analytic|, |numeric|, 1e-12).
// Requires 64-bit scalars and h in [1e-6, 1e-4]; non-finite values throw
// NumericError. The parameter's gradient is left zeroed.
double gradient_check(const std::function<Tensor()>& expression,
                      Tensor parameter, double h = 1e-5);

}  // namespace noiselab
