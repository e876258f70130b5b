#include "geoptr/model/config.hpp"

#include "geoptr/error.hpp"

namespace geoptr::model {

void ModelConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (hidden < 1) bad("hidden must be >= 1");
  if (key_dim() < 1 || value_dim() < 1) bad("d_k and d_v must be >= 1");
  if (self_attention && value_dim() != hidden) {
    bad("residual self-attention needs d_v == hidden");
  }
  if (beam_width < 1) bad("beam_width must be >= 1");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (!(lr >= 0.0)) bad("lr must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    bad("Adam betas must lie in [0, 1)");
  }
}

nlohmann::json ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(task));
  j["hidden"] = hidden;
  j["self_attention"] = self_attention;
  j["d_k"] = key_dim();
  j["d_v"] = value_dim();
  j["start_token"] = start_token == StartToken::Zero ? "zero" : "learned";
  j["beam_width"] = beam_width;
  j["mask_enabled"] = mask_enabled;
  j["lr"] = lr;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["batch_size"] = batch_size;
  j["precision"] = precision == Precision::Double ? "double" : "single";
  j["seed"] = seed;
  return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw Error(ErrorCode::ConfigInvalid, "unknown task");
    c.task = *task;
    c.hidden = j.value("hidden", c.hidden);
    c.self_attention = j.value("self_attention", c.self_attention);
    c.d_k = j.value("d_k", std::size_t{0});
    c.d_v = j.value("d_v", std::size_t{0});
    const std::string start = j.value("start_token", std::string("zero"));
    if (start != "zero" && start != "learned") {
      throw Error(ErrorCode::ConfigInvalid, "start_token must be zero or learned");
    }
    c.start_token = start == "zero" ? StartToken::Zero : StartToken::Learned;
    c.beam_width = j.value("beam_width", c.beam_width);
    c.mask_enabled = j.value("mask_enabled", c.mask_enabled);
    c.lr = j.value("lr", c.lr);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.batch_size = j.value("batch_size", c.batch_size);
    const std::string precision = j.value("precision", std::string("double"));
    if (precision != "double" && precision != "single") {
      throw Error(ErrorCode::ConfigInvalid, "precision must be double or single");
    }
    c.precision = precision == "double" ? Precision::Double : Precision::Single;
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  c.validate();
  return c;
}

}  // namespace geoptr::model
