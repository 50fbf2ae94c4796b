#pragma once

#include <string>
#include <vector>

#include "geomsign/model.hpp"
#include "geomsign/tensor.hpp"

namespace geomsign {

// On-disk checkpoint: <dir>/manifest.json describing the model config,
// training step and parameter table, plus one little-endian binary32 blob
// per parameter (params/NNN_<sanitized-name>.bin).
struct Checkpoint {
  ModelConfig config;
  size_t training_step = 0;
  std::vector<Tensor<float>> params;  // param_specs order
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir);
Checkpoint load_checkpoint(const std::string& dir);

}  // namespace geomsign
