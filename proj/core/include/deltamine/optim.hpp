#pragma once

#include <vector>

#include "deltamine/tensor.hpp"

namespace deltamine::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed set of parameter tensors. The moment
// buffers are positional, so the parameter list must not change between
// steps.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig config);

  // Applies one update from the gradients accumulated by backward(), then
  // leaves the gradients untouched (call zero_grad() before the next pass).
  void step();
  void zero_grad();

  std::size_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  AdamConfig config_;
  std::size_t step_ = 0;
};

}  // namespace deltamine::nn
