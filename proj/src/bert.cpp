#include "newsframe/bert.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "newsframe/errors.hpp"

namespace newsframe {

void to_json(nlohmann::json& j, const BertConfig& c) {
    j = nlohmann::json{{"model_type", "bert"},
                       {"vocab_size", c.vocab_size},
                       {"hidden_size", c.hidden_size},
                       {"num_hidden_layers", c.num_hidden_layers},
                       {"num_attention_heads", c.num_attention_heads},
                       {"intermediate_size", c.intermediate_size},
                       {"max_position_embeddings", c.max_position_embeddings},
                       {"type_vocab_size", c.type_vocab_size},
                       {"hidden_dropout_prob", c.hidden_dropout_prob},
                       {"attention_probs_dropout_prob", c.attention_probs_dropout_prob},
                       {"layer_norm_eps", c.layer_norm_eps},
                       {"initializer_range", c.initializer_range},
                       {"hidden_act", "gelu"}};
}

void from_json(const nlohmann::json& j, BertConfig& c) {
    BertConfig d;
    c.vocab_size = j.value("vocab_size", d.vocab_size);
    c.hidden_size = j.value("hidden_size", d.hidden_size);
    c.num_hidden_layers = j.value("num_hidden_layers", d.num_hidden_layers);
    c.num_attention_heads = j.value("num_attention_heads", d.num_attention_heads);
    c.intermediate_size = j.value("intermediate_size", d.intermediate_size);
    c.max_position_embeddings = j.value("max_position_embeddings", d.max_position_embeddings);
    c.type_vocab_size = j.value("type_vocab_size", d.type_vocab_size);
    c.hidden_dropout_prob = j.value("hidden_dropout_prob", d.hidden_dropout_prob);
    c.attention_probs_dropout_prob = j.value("attention_probs_dropout_prob", d.attention_probs_dropout_prob);
    c.layer_norm_eps = j.value("layer_norm_eps", d.layer_norm_eps);
    c.initializer_range = j.value("initializer_range", d.initializer_range);
    if (j.contains("hidden_act") && j["hidden_act"] != "gelu") {
        throw DataError("only gelu activations are supported, config has " + j["hidden_act"].dump());
    }
    if (c.hidden_size % c.num_attention_heads != 0) {
        throw DataError("hidden_size must be divisible by num_attention_heads");
    }
}

namespace {

torch::nn::LayerNorm layer_norm(const BertConfig& c) {
    return torch::nn::LayerNorm(torch::nn::LayerNormOptions({c.hidden_size}).eps(c.layer_norm_eps));
}

}  // namespace

BertEmbeddingsImpl::BertEmbeddingsImpl(const BertConfig& c) {
    word_embeddings = register_module("word_embeddings", torch::nn::Embedding(c.vocab_size, c.hidden_size));
    position_embeddings =
        register_module("position_embeddings", torch::nn::Embedding(c.max_position_embeddings, c.hidden_size));
    token_type_embeddings =
        register_module("token_type_embeddings", torch::nn::Embedding(c.type_vocab_size, c.hidden_size));
    LayerNorm = register_module("LayerNorm", layer_norm(c));
    dropout = register_module("dropout", torch::nn::Dropout(c.hidden_dropout_prob));
}

torch::Tensor BertEmbeddingsImpl::forward(const torch::Tensor& input_ids) {
    const auto T = input_ids.size(1);
    auto positions = torch::arange(T, input_ids.options()).unsqueeze(0);
    auto token_types = torch::zeros_like(input_ids);
    auto x = word_embeddings(input_ids) + position_embeddings(positions) + token_type_embeddings(token_types);
    return dropout(LayerNorm(x));
}

BertSelfAttentionImpl::BertSelfAttentionImpl(const BertConfig& c)
    : heads(c.num_attention_heads), head_dim(c.hidden_size / c.num_attention_heads) {
    query = register_module("query", torch::nn::Linear(c.hidden_size, c.hidden_size));
    key = register_module("key", torch::nn::Linear(c.hidden_size, c.hidden_size));
    value = register_module("value", torch::nn::Linear(c.hidden_size, c.hidden_size));
    dropout = register_module("dropout", torch::nn::Dropout(c.attention_probs_dropout_prob));
}

torch::Tensor BertSelfAttentionImpl::forward(const torch::Tensor& hidden, const torch::Tensor& additive_mask) {
    const auto B = hidden.size(0);
    const auto T = hidden.size(1);
    auto split = [&](const torch::Tensor& x) { return x.view({B, T, heads, head_dim}).transpose(1, 2); };
    auto q = split(query(hidden));
    auto k = split(key(hidden));
    auto v = split(value(hidden));
    auto scores = torch::matmul(q, k.transpose(-1, -2)) / std::sqrt(static_cast<double>(head_dim));
    scores = scores + additive_mask;
    auto probs = dropout(torch::softmax(scores, -1));
    auto ctx = torch::matmul(probs, v).transpose(1, 2).contiguous();
    return ctx.view({B, T, heads * head_dim});
}

BertResidualOutputImpl::BertResidualOutputImpl(std::int64_t in, const BertConfig& c) {
    dense = register_module("dense", torch::nn::Linear(in, c.hidden_size));
    LayerNorm = register_module("LayerNorm", layer_norm(c));
    dropout = register_module("dropout", torch::nn::Dropout(c.hidden_dropout_prob));
}

torch::Tensor BertResidualOutputImpl::forward(const torch::Tensor& x, const torch::Tensor& residual) {
    return LayerNorm(dropout(dense(x)) + residual);
}

BertAttentionImpl::BertAttentionImpl(const BertConfig& c) {
    self = register_module("self", BertSelfAttention(c));
    output = register_module("output", BertResidualOutput(c.hidden_size, c));
}

torch::Tensor BertAttentionImpl::forward(const torch::Tensor& hidden, const torch::Tensor& additive_mask) {
    return output(self(hidden, additive_mask), hidden);
}

BertIntermediateImpl::BertIntermediateImpl(const BertConfig& c) {
    dense = register_module("dense", torch::nn::Linear(c.hidden_size, c.intermediate_size));
}

torch::Tensor BertIntermediateImpl::forward(const torch::Tensor& x) { return torch::gelu(dense(x)); }

BertLayerImpl::BertLayerImpl(const BertConfig& c) {
    attention = register_module("attention", BertAttention(c));
    intermediate = register_module("intermediate", BertIntermediate(c));
    output = register_module("output", BertResidualOutput(c.intermediate_size, c));
}

torch::Tensor BertLayerImpl::forward(const torch::Tensor& hidden, const torch::Tensor& additive_mask) {
    auto attended = attention(hidden, additive_mask);
    return output(intermediate(attended), attended);
}

BertModelImpl::BertModelImpl(const BertConfig& c) : config(c) {
    embeddings = register_module("embeddings", BertEmbeddings(c));
    layers = torch::nn::ModuleList();
    for (std::int64_t i = 0; i < c.num_hidden_layers; ++i) layers->push_back(BertLayer(c));
    // "encoder.layer.N" in checkpoint naming
    auto encoder = std::make_shared<torch::nn::Module>("BertEncoder");
    encoder->register_module("layer", layers);
    register_module("encoder", encoder);

    torch::NoGradGuard no_grad;
    for (auto& m : modules(/*include_self=*/false)) {
        if (auto* lin = m->as<torch::nn::Linear>()) {
            torch::nn::init::normal_(lin->weight, 0.0, c.initializer_range);
            torch::nn::init::zeros_(lin->bias);
        } else if (auto* emb = m->as<torch::nn::Embedding>()) {
            torch::nn::init::normal_(emb->weight, 0.0, c.initializer_range);
        } else if (auto* ln = m->as<torch::nn::LayerNorm>()) {
            torch::nn::init::ones_(ln->weight);
            torch::nn::init::zeros_(ln->bias);
        }
    }
}

std::vector<torch::Tensor> BertModelImpl::forward(const torch::Tensor& input_ids, const torch::Tensor& attention_mask) {
    // 0 where attended, a large negative number at padding positions.
    auto mask = attention_mask.unsqueeze(1).unsqueeze(2).to(embeddings->word_embeddings->weight.dtype());
    auto additive = (1.0 - mask) * -1e4;
    std::vector<torch::Tensor> hidden;
    hidden.reserve(static_cast<std::size_t>(config.num_hidden_layers) + 1);
    hidden.push_back(embeddings(input_ids));
    for (const auto& layer : *layers) {
        hidden.push_back(layer->as<BertLayerImpl>()->forward(hidden.back(), additive));
    }
    return hidden;
}

}  // namespace newsframe
