#pragma once

#include <cstddef>
#include <span>

#include "geoptr/nn/tensor.hpp"
#include "geoptr/rng.hpp"

namespace geoptr::nn {

// Scores at or below -kLarge are masked. -infinity is avoided so that the
// max-subtraction in softmax never sees (-inf) - (-inf).
inline constexpr double kLarge = 1e9;
inline constexpr double kMasked = -kLarge;

inline bool is_masked(double score) { return score <= -0.5 * kLarge; }

// y = x W + b, x: B x in, W: in x out, b: 1 x out.
Tensor linear(const Tensor& x, const Parameter& w, const Parameter& b);
// Accumulates dW, db and returns dx.
Tensor linear_backward(const Tensor& x, Parameter& w, Parameter& b, const Tensor& dy);

// Row-wise. Throws AllMasked when every entry of a row is masked.
Tensor softmax_stable(const Tensor& scores);
Tensor log_softmax(const Tensor& scores);

struct CrossEntropy {
  double loss = 0.0;
  Tensor grad;  // d loss / d scores, 1 x k
};

// loss = -log_probs[target]; grad w.r.t. the scores = softmax - one_hot.
CrossEntropy cross_entropy(const Tensor& log_probs, std::size_t target);

Tensor xavier_init(std::size_t fan_in, std::size_t fan_out, Rng& rng);

// Elementwise helpers used by the recurrent and attention layers.
void tanh_inplace(Eigen::Ref<Tensor> x);
void sigmoid_inplace(Eigen::Ref<Tensor> x);

}  // namespace geoptr::nn
