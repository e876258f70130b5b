#pragma once

// Binary container of named tensors. Little-endian throughout:
//   "GPTRCKPT" | u32 version | u8 dtype (0 = f64, 1 = f32)
//   u32 len + config JSON
//   u32 n, then n x { u32 len + name | u32 rows | u32 cols | data }
//   u8 has_optimizer, then u64 t | f64 lr, beta1, beta2, eps |
//     u32 n moments, { tensor m } { tensor v } in parameter order

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geoptr/nn/adam.hpp"
#include "geoptr/nn/tensor.hpp"

namespace geoptr::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class DType : std::uint8_t { F64 = 0, F32 = 1 };

struct NamedTensor {
  std::string name;
  Tensor value;
};

struct CheckpointData {
  std::string config_json;
  std::vector<NamedTensor> tensors;
  bool has_optimizer = false;
  AdamState optimizer;
};

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data,
                      DType dtype = DType::F64);
CheckpointData read_checkpoint(const std::filesystem::path& path);

}  // namespace geoptr::nn
