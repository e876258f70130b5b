#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "geoptr/task.hpp"

namespace geoptr::model {

enum class StartToken { Zero, Learned };
enum class Precision { Double, Single };  // checkpoint storage only

struct ModelConfig {
  Task task = Task::DT;
  std::size_t hidden = 256;
  bool self_attention = true;
  std::size_t d_k = 0;  // 0 means hidden
  std::size_t d_v = 0;  // 0 means hidden
  StartToken start_token = StartToken::Zero;
  std::size_t beam_width = 4;
  bool mask_enabled = true;
  double lr = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::size_t batch_size = 128;
  Precision precision = Precision::Double;
  std::uint64_t seed = 0;

  std::size_t key_dim() const { return d_k == 0 ? hidden : d_k; }
  std::size_t value_dim() const { return d_v == 0 ? hidden : d_v; }

  // Throws ConfigInvalid.
  void validate() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

}  // namespace geoptr::model
