#pragma once

#include <cstddef>
#include <vector>

#include "noiselab/tensor.hpp"

namespace noiselab {

struct AdamConfig {
  Scalar learning_rate = Scalar(0.001);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
};

// Adam with bias-corrected moments. Owns one pair of moment buffers per
// parameter; parameters are shared handles into the model.
class Adam {
 public:
  Adam(std::vector<Tensor> parameters, AdamConfig config = {});

  // Applies one update from the populated gradients, then zeroes them.
  // Throws NumericError on a non-finite gradient before touching anything.
  void step();
  void zero_grad();

  std::size_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<Tensor>& parameters() const { return parameters_; }
  const std::vector<Scalar>& first_moment(std::size_t i) const { return first_[i]; }
  const std::vector<Scalar>& second_moment(std::size_t i) const { return second_[i]; }

 private:
  std::vector<Tensor> parameters_;
  AdamConfig config_;
  std::vector<std::vector<Scalar>> first_;
  std::vector<std::vector<Scalar>> second_;
  std::size_t step_count_ = 0;
};

}  // namespace noiselab
