#include "geoptr/nn/ops.hpp"

#include <cmath>
#include <string>

#include "geoptr/error.hpp"

namespace geoptr::nn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

}  // namespace

Tensor linear(const Tensor& x, const Parameter& w, const Parameter& b) {
  require(x.cols() == w.value.rows(), "linear: input width does not match weight rows");
  require(b.value.rows() == 1 && b.value.cols() == w.value.cols(),
          "linear: bias must be 1 x out");
  Tensor y = x * w.value;
  y.rowwise() += b.value.row(0);
  return y;
}

Tensor linear_backward(const Tensor& x, Parameter& w, Parameter& b, const Tensor& dy) {
  require(dy.rows() == x.rows() && dy.cols() == w.value.cols(),
          "linear_backward: gradient shape does not match output");
  w.grad.noalias() += x.transpose() * dy;
  b.grad += dy.colwise().sum();
  return dy * w.value.transpose();
}

Tensor softmax_stable(const Tensor& scores) {
  Tensor out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double top = scores.row(r).maxCoeff();
    if (is_masked(top)) throw Error(ErrorCode::AllMasked, "every score in the row is masked");
    out.row(r) = (scores.row(r).array() - top).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

Tensor log_softmax(const Tensor& scores) {
  Tensor out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double top = scores.row(r).maxCoeff();
    if (is_masked(top)) throw Error(ErrorCode::AllMasked, "every score in the row is masked");
    const double lse = top + std::log((scores.row(r).array() - top).exp().sum());
    out.row(r) = scores.row(r).array() - lse;
  }
  return out;
}

CrossEntropy cross_entropy(const Tensor& log_probs, std::size_t target) {
  if (log_probs.rows() != 1) throw Error(ErrorCode::ShapeMismatch, "cross_entropy takes one row");
  if (target >= static_cast<std::size_t>(log_probs.cols())) {
    throw Error(ErrorCode::IndexOutOfRange, "target " + std::to_string(target) + " out of " +
                                                std::to_string(log_probs.cols()) + " classes");
  }
  const auto t = static_cast<Eigen::Index>(target);
  CrossEntropy ce;
  ce.loss = -log_probs(0, t);
  ce.grad = log_probs.array().exp();
  ce.grad(0, t) -= 1.0;
  return ce;
}

Tensor xavier_init(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(fan_in, fan_out);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-a, a);
  return t;
}

// tanh(x) = 1 - 2 / (exp(2x) + 1); Eigen vectorizes exp for doubles but not
// tanh.
void tanh_inplace(Eigen::Ref<Tensor> x) {
  // exp overflow gives 2 / inf = 0, so large inputs saturate cleanly.
  auto a = x.array();
  a = 1.0 - 2.0 / ((2.0 * a).exp() + 1.0);
}

void sigmoid_inplace(Eigen::Ref<Tensor> x) {
  auto a = x.array();
  a = 1.0 / (1.0 + (-a).exp());
}

}  // namespace geoptr::nn
