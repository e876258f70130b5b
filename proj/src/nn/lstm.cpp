#include "geoptr/nn/lstm.hpp"

#include "geoptr/error.hpp"
#include "geoptr/nn/ops.hpp"

namespace geoptr::nn {

LstmWeights LstmWeights::create(const std::string& name, std::size_t input_dim,
                                std::size_t hidden, Rng& rng, double forget_bias) {
  LstmWeights w;
  w.kernel = Parameter(name + ".kernel", xavier_init(input_dim, 4 * hidden, rng));
  w.recurrent = Parameter(name + ".recurrent", xavier_init(hidden, 4 * hidden, rng));
  Tensor bias = Tensor::Zero(1, 4 * hidden);
  bias.block(0, hidden, 1, hidden).setConstant(forget_bias);
  w.bias = Parameter(name + ".bias", std::move(bias));
  return w;
}

LstmState lstm_step(const LstmWeights& w, const Tensor& x, const LstmState& s, LstmCache* cache) {
  const Eigen::Index H = w.recurrent.value.rows();
  if (x.cols() != w.kernel.value.rows() || s.h.cols() != H || s.c.cols() != H ||
      s.h.rows() != x.rows() || s.c.rows() != x.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "lstm_step: input or state shape mismatch");
  }
  Tensor gates = x * w.kernel.value;
  gates.noalias() += s.h * w.recurrent.value;
  gates.rowwise() += w.bias.value.row(0);

  sigmoid_inplace(gates.leftCols(2 * H));
  tanh_inplace(gates.middleCols(2 * H, H));
  sigmoid_inplace(gates.rightCols(H));

  LstmState next;
  next.c = gates.middleCols(H, H).cwiseProduct(s.c) +
           gates.leftCols(H).cwiseProduct(gates.middleCols(2 * H, H));
  Tensor tanh_c = next.c;
  tanh_inplace(tanh_c);
  next.h = gates.rightCols(H).cwiseProduct(tanh_c);

  if (cache) {
    cache->x = x;
    cache->h_prev = s.h;
    cache->c_prev = s.c;
    cache->gates = std::move(gates);
    cache->tanh_c = std::move(tanh_c);
  }
  return next;
}

LstmStepGrad lstm_step_backward(LstmWeights& w, const LstmCache& cache, const Tensor& dh,
                                const Tensor& dc) {
  const Eigen::Index H = w.recurrent.value.rows();
  const auto i = cache.gates.leftCols(H).array();
  const auto f = cache.gates.middleCols(H, H).array();
  const auto g = cache.gates.middleCols(2 * H, H).array();
  const auto o = cache.gates.rightCols(H).array();
  const auto tc = cache.tanh_c.array();

  const Tensor dc_total = dc.array() + dh.array() * o * (1.0 - tc * tc);

  Tensor dgates(cache.gates.rows(), 4 * H);
  dgates.leftCols(H) = dc_total.array() * g * i * (1.0 - i);
  dgates.middleCols(H, H) = dc_total.array() * cache.c_prev.array() * f * (1.0 - f);
  dgates.middleCols(2 * H, H) = dc_total.array() * i * (1.0 - g * g);
  dgates.rightCols(H) = dh.array() * tc * o * (1.0 - o);

  w.kernel.grad.noalias() += cache.x.transpose() * dgates;
  w.recurrent.grad.noalias() += cache.h_prev.transpose() * dgates;
  w.bias.grad += dgates.colwise().sum();

  LstmStepGrad out;
  out.dx = dgates * w.kernel.value.transpose();
  out.dh_prev = dgates * w.recurrent.value.transpose();
  out.dc_prev = dc_total.array() * f;
  return out;
}

}  // namespace geoptr::nn
