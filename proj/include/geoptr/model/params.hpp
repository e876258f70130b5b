#pragma once

#include "geoptr/model/config.hpp"
#include "geoptr/nn/lstm.hpp"
#include "geoptr/nn/tensor.hpp"
#include "geoptr/rng.hpp"

namespace geoptr::model {

struct ModelParams {
  nn::Parameter embed_w;  // 2 x H, shared by encoder and decoder inputs
  nn::Parameter embed_b;  // 1 x H
  nn::LstmWeights encoder;
  nn::LstmWeights decoder;
  nn::Parameter att_q;  // H x d_k
  nn::Parameter att_k;  // H x d_k
  nn::Parameter att_v;  // H x d_v
  nn::Parameter ptr_w1;  // H x H, applied to encoder rows
  nn::Parameter ptr_w2;  // H x H, applied to the decoder state
  nn::Parameter ptr_v;   // 1 x H
  nn::Parameter end_embedding;  // 1 x H, pointer slot m
  nn::Parameter start_token;    // 1 x 2, learned first decoder input (coordinates)

  // Xavier-uniform matrices, zero biases except the LSTM forget gate (1).
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);

  nn::ParameterList list();
  std::vector<const nn::Parameter*> list() const;
  std::size_t count() const;
};

}  // namespace geoptr::model

#include <filesystem>

#include "geoptr/nn/adam.hpp"

namespace geoptr::model {

struct LoadedModel {
  ModelConfig config;
  ModelParams params;
  bool has_optimizer = false;
  nn::AdamState optimizer;
};

// Weights are stored in config.precision; optimizer moments always in double.
void save_model(const std::filesystem::path& path, const ModelConfig& config,
                const ModelParams& params, const nn::AdamState* optimizer = nullptr);
// Throws CheckpointMismatch when tensors are missing or shaped differently
// from what the stored config implies.
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace geoptr::model
