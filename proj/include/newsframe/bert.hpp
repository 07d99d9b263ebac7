#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>
#include <torch/nn.h>

namespace newsframe {

/// Transformer encoder hyper-parameters; JSON keys follow the Hugging Face
/// BERT config.json so downloaded checkpoints load unchanged.
struct BertConfig {
    std::int64_t vocab_size = 30522;
    std::int64_t hidden_size = 768;
    std::int64_t num_hidden_layers = 12;
    std::int64_t num_attention_heads = 12;
    std::int64_t intermediate_size = 3072;
    std::int64_t max_position_embeddings = 512;
    std::int64_t type_vocab_size = 2;
    double hidden_dropout_prob = 0.1;
    double attention_probs_dropout_prob = 0.1;
    double layer_norm_eps = 1e-12;
    double initializer_range = 0.02;
};

void to_json(nlohmann::json& j, const BertConfig& c);
void from_json(const nlohmann::json& j, BertConfig& c);

// Parameter names below mirror the reference BERT implementation
// ("embeddings.word_embeddings.weight", "encoder.layer.0.attention.self.query.weight", ...).

struct BertEmbeddingsImpl : torch::nn::Module {
    explicit BertEmbeddingsImpl(const BertConfig& c);
    torch::Tensor forward(const torch::Tensor& input_ids);

    torch::nn::Embedding word_embeddings{nullptr}, position_embeddings{nullptr}, token_type_embeddings{nullptr};
    torch::nn::LayerNorm LayerNorm{nullptr};
    torch::nn::Dropout dropout{nullptr};
};
TORCH_MODULE(BertEmbeddings);

struct BertSelfAttentionImpl : torch::nn::Module {
    explicit BertSelfAttentionImpl(const BertConfig& c);
    /// additive_mask: [B, 1, 1, T], 0 for tokens, large negative for padding.
    torch::Tensor forward(const torch::Tensor& hidden, const torch::Tensor& additive_mask);

    std::int64_t heads, head_dim;
    torch::nn::Linear query{nullptr}, key{nullptr}, value{nullptr};
    torch::nn::Dropout dropout{nullptr};
};
TORCH_MODULE(BertSelfAttention);

struct BertResidualOutputImpl : torch::nn::Module {
    BertResidualOutputImpl(std::int64_t in, const BertConfig& c);
    torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& residual);

    torch::nn::Linear dense{nullptr};
    torch::nn::LayerNorm LayerNorm{nullptr};
    torch::nn::Dropout dropout{nullptr};
};
TORCH_MODULE(BertResidualOutput);

struct BertAttentionImpl : torch::nn::Module {
    explicit BertAttentionImpl(const BertConfig& c);
    torch::Tensor forward(const torch::Tensor& hidden, const torch::Tensor& additive_mask);

    BertSelfAttention self{nullptr};
    BertResidualOutput output{nullptr};
};
TORCH_MODULE(BertAttention);

struct BertIntermediateImpl : torch::nn::Module {
    explicit BertIntermediateImpl(const BertConfig& c);
    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::Linear dense{nullptr};
};
TORCH_MODULE(BertIntermediate);

struct BertLayerImpl : torch::nn::Module {
    explicit BertLayerImpl(const BertConfig& c);
    torch::Tensor forward(const torch::Tensor& hidden, const torch::Tensor& additive_mask);

    BertAttention attention{nullptr};
    BertIntermediate intermediate{nullptr};
    BertResidualOutput output{nullptr};
};
TORCH_MODULE(BertLayer);

struct BertModelImpl : torch::nn::Module {
    explicit BertModelImpl(const BertConfig& c);

    /// Embedding output followed by every layer's output, each [B, T, H].
    std::vector<torch::Tensor> forward(const torch::Tensor& input_ids, const torch::Tensor& attention_mask);

    BertConfig config;
    BertEmbeddings embeddings{nullptr};
    torch::nn::ModuleList layers{nullptr};
};
TORCH_MODULE(BertModel);

}  // namespace newsframe
