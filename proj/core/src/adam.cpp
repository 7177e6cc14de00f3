#include "noiselab/adam.hpp"

#include <cmath>
#include <string>

namespace noiselab {

Adam::Adam(std::vector<Tensor> parameters, AdamConfig config)
    : parameters_(std::move(parameters)), config_(config) {
  for (const Tensor& p : parameters_) {
    first_.emplace_back(p.size(), Scalar{0});
    second_.emplace_back(p.size(), Scalar{0});
  }
}

void Adam::step() {
  for (std::size_t k = 0; k < parameters_.size(); ++k) {
    for (Scalar g : parameters_[k].grad()) {
      if (!std::isfinite(g)) {
        throw NumericError("adam: non-finite gradient in parameter " +
                           std::to_string(k) + " " +
                           parameters_[k].shape().to_string());
      }
    }
  }
  ++step_count_;
  const Scalar t = static_cast<Scalar>(step_count_);
  const Scalar correction1 = Scalar{1} - std::pow(config_.beta1, t);
  const Scalar correction2 = Scalar{1} - std::pow(config_.beta2, t);
  for (std::size_t k = 0; k < parameters_.size(); ++k) {
    Tensor& p = parameters_[k];
    auto values = p.mutable_values();
    auto grad = p.mutable_grad();
    auto& m = first_[k];
    auto& v = second_[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Scalar g = grad[i];
      m[i] = config_.beta1 * m[i] + (Scalar{1} - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (Scalar{1} - config_.beta2) * g * g;
      const Scalar m_hat = m[i] / correction1;
      const Scalar v_hat = v[i] / correction2;
      values[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
      grad[i] = Scalar{0};
    }
  }
}

void Adam::zero_grad() {
  for (Tensor& p : parameters_) p.zero_grad();
}

}  // namespace noiselab
