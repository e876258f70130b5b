#pragma once

#include <cstdint>
#include <vector>

#include "geoptr/nn/tensor.hpp"

namespace geoptr::nn {

struct AdamState {
  double lr = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t t = 0;
  std::vector<Tensor> m;  // first moments, one per parameter
  std::vector<Tensor> v;  // second moments
};

// Bias-corrected update of every parameter from its grad, then zeroes grads.
// Moments are allocated on the first call.
void adam_step(AdamState& state, const ParameterList& params);

}  // namespace geoptr::nn
