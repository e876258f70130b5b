#pragma once

#include <cstddef>
#include <string>

#include "geoptr/nn/tensor.hpp"
#include "geoptr/rng.hpp"

namespace geoptr::nn {

// Gate blocks are laid out [input | forget | candidate | output].
struct LstmWeights {
  Parameter kernel;     // in x 4H
  Parameter recurrent;  // H x 4H
  Parameter bias;       // 1 x 4H

  static LstmWeights create(const std::string& name, std::size_t input_dim, std::size_t hidden,
                            Rng& rng, double forget_bias = 1.0);

  std::size_t hidden() const { return static_cast<std::size_t>(recurrent.value.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(kernel.value.rows()); }
};

struct LstmState {
  Tensor h;  // B x H
  Tensor c;  // B x H

  static LstmState zeros(std::size_t batch, std::size_t hidden) {
    return {Tensor::Zero(batch, hidden), Tensor::Zero(batch, hidden)};
  }
};

struct LstmCache {
  Tensor x;
  Tensor h_prev;
  Tensor c_prev;
  Tensor gates;  // post-activation i, f, g, o
  Tensor tanh_c;
};

LstmState lstm_step(const LstmWeights& w, const Tensor& x, const LstmState& s,
                    LstmCache* cache = nullptr);

struct LstmStepGrad {
  Tensor dx;
  Tensor dh_prev;
  Tensor dc_prev;
};

// Accumulates weight gradients into w; dh and dc are gradients of the loss
// w.r.t. this step's outputs.
LstmStepGrad lstm_step_backward(LstmWeights& w, const LstmCache& cache, const Tensor& dh,
                                const Tensor& dc);

}  // namespace geoptr::nn
