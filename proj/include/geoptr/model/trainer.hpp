#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "geoptr/dataset.hpp"
#include "geoptr/model/config.hpp"
#include "geoptr/model/params.hpp"
#include "geoptr/nn/adam.hpp"

namespace geoptr::model {

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double seconds = 0.0;
};

struct TrainOptions {
  std::size_t epochs = 1;
  std::uint64_t shuffle_seed = 0;
  // Multiplies the learning rate after every epoch.
  double lr_decay = 1.0;
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainHistory {
  std::vector<double> step_loss;
  std::vector<EpochStats> epochs;
};

// Adam state for config's hyperparameters.
nn::AdamState make_optimizer(const ModelConfig& config);

// Mini-batch training over shuffled instances; the last partial batch is kept.
TrainHistory train(const Dataset& data, ModelParams& params, nn::AdamState& adam,
                   const ModelConfig& config, const TrainOptions& options);

}  // namespace geoptr::model
