#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "geoptr/nn/tensor.hpp"

namespace geoptr::nn {

// Evaluates the loss at the current parameter values. When with_grad is set
// it must also leave d loss / d param in every Parameter::grad (zeroed first).
using LossFunction = std::function<double(bool with_grad)>;

struct GradCheckOptions {
  double h = 1e-5;
  // Coordinates checked per tensor; 0 checks all of them.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
  // Denominator floor for the relative error, so that gradients that are zero
  // up to roundoff are compared absolutely.
  double floor = 1e-6;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

// Central differences against the analytic gradient. Parameter values are
// restored on return.
GradCheckResult grad_check(const LossFunction& loss, const ParameterList& params,
                           const GradCheckOptions& opts = {});

}  // namespace geoptr::nn
