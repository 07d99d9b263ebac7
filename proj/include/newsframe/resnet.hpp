#pragma once

#include <array>
#include <string>

#include <nlohmann/json_fwd.hpp>
#include <torch/nn.h>

namespace newsframe {

/// Residual convnet layout. "resnet50" is the standard 50-layer bottleneck
/// network; "resnet18" and the narrow "resnet-tiny" use basic blocks.
struct ResNetConfig {
    std::string arch = "resnet50";
    bool bottleneck = true;
    std::array<int, 4> blocks{3, 4, 6, 3};
    std::int64_t width = 64;

    static ResNetConfig named(const std::string& arch);
    std::int64_t output_channels() const { return width * 8 * (bottleneck ? 4 : 1); }
};

void to_json(nlohmann::json& j, const ResNetConfig& c);
void from_json(const nlohmann::json& j, ResNetConfig& c);

struct ResidualBlockImpl : torch::nn::Module {
    ResidualBlockImpl(std::int64_t in, std::int64_t planes, std::int64_t stride, bool bottleneck);
    torch::Tensor forward(torch::Tensor x);

    bool bottleneck;
    torch::nn::Conv2d conv1{nullptr}, conv2{nullptr}, conv3{nullptr};
    torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr}, bn3{nullptr};
    torch::nn::Sequential downsample{nullptr};
};
TORCH_MODULE(ResidualBlock);

/// Convolutional trunk up to global average pooling; parameter names match
/// the torchvision layout (conv1, bn1, layer1.0.conv1, ..., downsample.0).
struct ResNetTrunkImpl : torch::nn::Module {
    explicit ResNetTrunkImpl(const ResNetConfig& c);
    /// [B, 3, H, W] -> [B, output_channels]
    torch::Tensor forward(torch::Tensor x);

    ResNetConfig config;
    torch::nn::Conv2d conv1{nullptr};
    torch::nn::BatchNorm2d bn1{nullptr};
    std::array<torch::nn::Sequential, 4> stages;
};
TORCH_MODULE(ResNetTrunk);

}  // namespace newsframe
