#include "newsframe/resnet.hpp"

#include <nlohmann/json.hpp>

#include "newsframe/errors.hpp"

namespace newsframe {

ResNetConfig ResNetConfig::named(const std::string& arch) {
    ResNetConfig c;
    c.arch = arch;
    if (arch == "resnet50") {
        c.bottleneck = true;
        c.blocks = {3, 4, 6, 3};
        c.width = 64;
    } else if (arch == "resnet18") {
        c.bottleneck = false;
        c.blocks = {2, 2, 2, 2};
        c.width = 64;
    } else if (arch == "resnet-tiny") {
        c.bottleneck = false;
        c.blocks = {1, 1, 1, 1};
        c.width = 8;
    } else {
        throw DataError("unknown residual network architecture '" + arch + "'");
    }
    return c;
}

void to_json(nlohmann::json& j, const ResNetConfig& c) {
    j = nlohmann::json{{"arch", c.arch}, {"bottleneck", c.bottleneck}, {"blocks", c.blocks}, {"width", c.width}};
}

void from_json(const nlohmann::json& j, ResNetConfig& c) {
    c = ResNetConfig::named(j.value("arch", std::string("resnet50")));
    c.bottleneck = j.value("bottleneck", c.bottleneck);
    if (j.contains("blocks")) c.blocks = j.at("blocks").get<std::array<int, 4>>();
    c.width = j.value("width", c.width);
}

namespace {

torch::nn::Conv2d conv(std::int64_t in, std::int64_t out, std::int64_t k, std::int64_t stride, std::int64_t pad) {
    return torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, k).stride(stride).padding(pad).bias(false));
}

}  // namespace

ResidualBlockImpl::ResidualBlockImpl(std::int64_t in, std::int64_t planes, std::int64_t stride, bool bneck)
    : bottleneck(bneck) {
    const std::int64_t expansion = bottleneck ? 4 : 1;
    const std::int64_t out = planes * expansion;
    if (bottleneck) {
        conv1 = register_module("conv1", conv(in, planes, 1, 1, 0));
        bn1 = register_module("bn1", torch::nn::BatchNorm2d(planes));
        conv2 = register_module("conv2", conv(planes, planes, 3, stride, 1));
        bn2 = register_module("bn2", torch::nn::BatchNorm2d(planes));
        conv3 = register_module("conv3", conv(planes, out, 1, 1, 0));
        bn3 = register_module("bn3", torch::nn::BatchNorm2d(out));
    } else {
        conv1 = register_module("conv1", conv(in, planes, 3, stride, 1));
        bn1 = register_module("bn1", torch::nn::BatchNorm2d(planes));
        conv2 = register_module("conv2", conv(planes, planes, 3, 1, 1));
        bn2 = register_module("bn2", torch::nn::BatchNorm2d(planes));
    }
    if (stride != 1 || in != out) {
        downsample = register_module("downsample",
                                     torch::nn::Sequential(conv(in, out, 1, stride, 0), torch::nn::BatchNorm2d(out)));
    }
}

torch::Tensor ResidualBlockImpl::forward(torch::Tensor x) {
    auto identity = downsample ? downsample->forward(x) : x;
    auto y = torch::relu(bn1(conv1(x)));
    if (bottleneck) {
        y = torch::relu(bn2(conv2(y)));
        y = bn3(conv3(y));
    } else {
        y = bn2(conv2(y));
    }
    return torch::relu(y + identity);
}

ResNetTrunkImpl::ResNetTrunkImpl(const ResNetConfig& c) : config(c) {
    conv1 = register_module("conv1", conv(3, c.width, 7, 2, 3));
    bn1 = register_module("bn1", torch::nn::BatchNorm2d(c.width));
    const std::int64_t expansion = c.bottleneck ? 4 : 1;
    std::int64_t in = c.width;
    for (std::size_t s = 0; s < 4; ++s) {
        const std::int64_t planes = c.width << s;
        torch::nn::Sequential stage;
        for (int b = 0; b < c.blocks[s]; ++b) {
            const std::int64_t stride = (b == 0 && s > 0) ? 2 : 1;
            stage->push_back(ResidualBlock(in, planes, stride, c.bottleneck));
            in = planes * expansion;
        }
        stages[s] = register_module("layer" + std::to_string(s + 1), stage);
    }

    torch::NoGradGuard no_grad;
    for (auto& m : modules(/*include_self=*/false)) {
        if (auto* cv = m->as<torch::nn::Conv2d>()) {
            torch::nn::init::kaiming_normal_(cv->weight, 0.0, torch::kFanOut, torch::kReLU);
        } else if (auto* bn = m->as<torch::nn::BatchNorm2d>()) {
            torch::nn::init::ones_(bn->weight);
            torch::nn::init::zeros_(bn->bias);
        }
    }
}

torch::Tensor ResNetTrunkImpl::forward(torch::Tensor x) {
    x = torch::relu(bn1(conv1(x)));
    x = torch::max_pool2d(x, 3, 2, 1);
    for (auto& stage : stages) x = stage->forward(x);
    return torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
}

}  // namespace newsframe
