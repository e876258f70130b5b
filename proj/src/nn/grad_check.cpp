#include "geoptr/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geoptr/rng.hpp"

namespace geoptr::nn {

GradCheckResult grad_check(const LossFunction& loss, const ParameterList& params,
                           const GradCheckOptions& opts) {
  loss(true);
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (const Parameter* p : params) analytic.push_back(p->grad);

  GradCheckResult result;
  Rng rng(opts.seed);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    const std::size_t n = p.size();
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (opts.max_coords_per_tensor != 0 && n > opts.max_coords_per_tensor) {
      rng.shuffle(std::span<std::size_t>(coords));
      coords.resize(opts.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t c : coords) {
      double& w = p.value.data()[c];
      const double saved = w;
      w = saved + opts.h;
      const double up = loss(false);
      w = saved - opts.h;
      const double down = loss(false);
      w = saved;

      const double numeric = (up - down) / (2.0 * opts.h);
      const double exact = analytic[k].data()[c];
      const double denom = std::max({std::abs(numeric), std::abs(exact), opts.floor});
      const double rel = std::abs(numeric - exact) / denom;
      ++result.coordinates;
      if (result.worst_parameter.empty() || rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_parameter = p.name;
        result.worst_index = c;
        result.analytic = exact;
        result.numeric = numeric;
      }
    }
  }
  // Leave the analytic gradient in place for the caller.
  for (std::size_t k = 0; k < params.size(); ++k) params[k]->grad = analytic[k];
  return result;
}

}  // namespace geoptr::nn
