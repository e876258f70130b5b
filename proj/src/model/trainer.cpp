#include "geoptr/model/trainer.hpp"

#include <chrono>
#include <numeric>

#include "geoptr/error.hpp"
#include "geoptr/model/network.hpp"
#include "geoptr/rng.hpp"

namespace geoptr::model {

nn::AdamState make_optimizer(const ModelConfig& config) {
  nn::AdamState adam;
  adam.lr = config.lr;
  adam.beta1 = config.beta1;
  adam.beta2 = config.beta2;
  return adam;
}

TrainHistory train(const Dataset& data, ModelParams& params, nn::AdamState& adam,
                   const ModelConfig& config, const TrainOptions& options) {
  config.validate();
  if (data.instances.empty()) throw Error(ErrorCode::InfeasibleConfig, "no training instances");
  if (data.header.task != config.task) {
    throw Error(ErrorCode::ConfigInvalid, "dataset task differs from the model task");
  }
  TrainHistory history;
  std::vector<std::size_t> order(data.instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const Instance*> batch;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = Rng::substream(options.shuffle_seed, epoch);
    rng.shuffle(std::span<std::size_t>(order));
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t i = 0; i < order.size(); i += config.batch_size) {
      batch.clear();
      for (std::size_t j = i; j < std::min(order.size(), i + config.batch_size); ++j) {
        batch.push_back(&data.instances[order[j]]);
      }
      const double loss = train_step(batch, params, adam, config);
      history.step_loss.push_back(loss);
      sum += loss;
      ++batches;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = sum / static_cast<double>(batches);
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    history.epochs.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);
    adam.lr *= options.lr_decay;
  }
  return history;
}

}  // namespace geoptr::model
