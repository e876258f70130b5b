#pragma once

// Forward pass pieces shared by training and decoding, and the batched
// teacher-forced loss with its hand-written backward pass.

#include <cstddef>
#include <optional>
#include <span>

#include "geoptr/dataset.hpp"
#include "geoptr/geometry.hpp"
#include "geoptr/model/config.hpp"
#include "geoptr/model/params.hpp"
#include "geoptr/nn/adam.hpp"
#include "geoptr/nn/lstm.hpp"
#include "geoptr/nn/tensor.hpp"

namespace geoptr::model {

struct EncoderOutput {
  nn::Tensor memory;     // (m + 1) x H; row m is the end sentinel
  nn::Tensor projected;  // memory * W1, cached for the pointer scores
  nn::LstmState final_state;

  std::size_t slots() const { return static_cast<std::size_t>(memory.rows()); }
};

// Points are expected in canonical (sorted) order.
EncoderOutput encode(const PointSet& points, const ModelParams& params, const ModelConfig& config);

// Raw encoder LSTM outputs, m x H, before self-attention.
nn::Tensor encoder_states(const PointSet& points, const ModelParams& params);

// E + softmax(E Wq (E Wk)^T / sqrt(d_k)) E Wv.
nn::Tensor self_attend(const nn::Tensor& E, const ModelParams& params);

// u_j = v^T tanh(W1 e_j + W2 h) for each row of h (k x H); returns k x (m + 1).
nn::Tensor pointer_scores(const nn::Tensor& h, const EncoderOutput& enc, const ModelParams& params);

// Embedded decoder input for the step after `previous`; nullopt is the first
// step (zero vector or learned start token).
nn::Tensor decoder_input(const PointSet& points, std::optional<std::size_t> previous,
                         const ModelParams& params, const ModelConfig& config);

// Mean over the batch of the summed per-step cross-entropy under teacher
// forcing. All instances must share the task and point count. With
// with_grad, gradients are accumulated into params. Throws LabelMasked,
// ShapeMismatch.
double forward_loss(std::span<const Instance* const> batch, ModelParams& params,
                    const ModelConfig& config, bool with_grad = false);
double forward_loss(std::span<const Instance> batch, ModelParams& params,
                    const ModelConfig& config, bool with_grad = false);

// forward_loss with gradients, then one Adam update. Returns the loss before
// the update.
double train_step(std::span<const Instance* const> batch, ModelParams& params,
                  nn::AdamState& adam, const ModelConfig& config);

}  // namespace geoptr::model
