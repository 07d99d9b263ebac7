#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <torch/types.h>

namespace newsframe::safetensors {

using TensorMap = std::map<std::string, torch::Tensor>;

/// Reads every tensor in a .safetensors file onto the CPU. F16/BF16 tensors
/// are widened to float32.
TensorMap load(const std::filesystem::path& path);

/// Writes contiguous CPU copies of the tensors; keys are stored sorted.
void save(const std::filesystem::path& path, const TensorMap& tensors,
          const std::map<std::string, std::string>& metadata = {});

}  // namespace newsframe::safetensors
