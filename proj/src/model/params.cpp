#include "geoptr/model/params.hpp"

#include <map>

#include "geoptr/error.hpp"
#include "geoptr/nn/checkpoint.hpp"
#include "geoptr/nn/ops.hpp"

namespace geoptr::model {

using nn::Parameter;
using nn::Tensor;

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const std::size_t H = config.hidden;
  ModelParams p;
  p.embed_w = Parameter("embed.w", nn::xavier_init(2, H, rng));
  p.embed_b = Parameter("embed.b", Tensor::Zero(1, H));
  p.encoder = nn::LstmWeights::create("encoder", H, H, rng);
  p.decoder = nn::LstmWeights::create("decoder", H, H, rng);
  p.att_q = Parameter("attention.q", nn::xavier_init(H, config.key_dim(), rng));
  p.att_k = Parameter("attention.k", nn::xavier_init(H, config.key_dim(), rng));
  p.att_v = Parameter("attention.v", nn::xavier_init(H, config.value_dim(), rng));
  p.ptr_w1 = Parameter("pointer.w1", nn::xavier_init(H, H, rng));
  p.ptr_w2 = Parameter("pointer.w2", nn::xavier_init(H, H, rng));
  p.ptr_v = Parameter("pointer.v", nn::xavier_init(1, H, rng));
  p.end_embedding = Parameter("end_embedding", nn::xavier_init(1, H, rng));
  p.start_token = Parameter("start_token", nn::xavier_init(1, 2, rng));
  return p;
}

nn::ParameterList ModelParams::list() {
  return {&embed_w,          &embed_b,          &encoder.kernel, &encoder.recurrent,
          &encoder.bias,     &decoder.kernel,   &decoder.recurrent, &decoder.bias,
          &att_q,            &att_k,            &att_v,          &ptr_w1,
          &ptr_w2,           &ptr_v,            &end_embedding,  &start_token};
}

std::vector<const Parameter*> ModelParams::list() const {
  auto all = const_cast<ModelParams*>(this)->list();
  return {all.begin(), all.end()};
}

std::size_t ModelParams::count() const {
  std::size_t n = 0;
  for (const Parameter* p : list()) n += p->size();
  return n;
}

void save_model(const std::filesystem::path& path, const ModelConfig& config,
                const ModelParams& params, const nn::AdamState* optimizer) {
  nn::CheckpointData data;
  data.config_json = config.to_json().dump();
  for (const Parameter* p : params.list()) data.tensors.push_back({p->name, p->value});
  if (optimizer) {
    data.has_optimizer = true;
    data.optimizer = *optimizer;
  }
  nn::write_checkpoint(path, data,
                       config.precision == Precision::Double ? nn::DType::F64 : nn::DType::F32);
}

LoadedModel load_model(const std::filesystem::path& path) {
  nn::CheckpointData data = nn::read_checkpoint(path);
  LoadedModel out;
  try {
    out.config = ModelConfig::from_json(nlohmann::json::parse(data.config_json));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CheckpointMismatch, std::string("unreadable config: ") + e.what());
  }
  out.params = ModelParams::init(out.config, 0);

  std::map<std::string, Tensor*> stored;
  for (nn::NamedTensor& t : data.tensors) stored[t.name] = &t.value;
  for (Parameter* p : out.params.list()) {
    const auto it = stored.find(p->name);
    if (it == stored.end()) {
      throw Error(ErrorCode::CheckpointMismatch, "missing tensor " + p->name);
    }
    if (it->second->rows() != p->value.rows() || it->second->cols() != p->value.cols()) {
      throw Error(ErrorCode::CheckpointMismatch, "tensor " + p->name + " has the wrong shape");
    }
    p->value = *it->second;
    p->zero_grad();
  }
  if (stored.size() != out.params.list().size()) {
    throw Error(ErrorCode::CheckpointMismatch, "checkpoint holds unexpected tensors");
  }
  out.has_optimizer = data.has_optimizer;
  if (data.has_optimizer) {
    out.optimizer = std::move(data.optimizer);
    const auto params = out.params.list();
    if (!out.optimizer.m.empty() && out.optimizer.m.size() != params.size()) {
      throw Error(ErrorCode::CheckpointMismatch, "optimizer state does not match parameters");
    }
  }
  return out;
}

}  // namespace geoptr::model
