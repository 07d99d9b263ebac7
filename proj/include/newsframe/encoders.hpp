#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <torch/nn.h>

#include "newsframe/bert.hpp"
#include "newsframe/image.hpp"
#include "newsframe/resnet.hpp"
#include "newsframe/safetensors.hpp"
#include "newsframe/tokenizer.hpp"

namespace newsframe {

enum class PoolMode {
    PooledLast4,    ///< [CLS] position of the last four hidden layers, concatenated: 4H
    PerTokenLast4,  ///< one 4H row per word piece (special tokens excluded)
};

struct TokenBatch {
    torch::Tensor input_ids;       ///< [B, T] long
    torch::Tensor attention_mask;  ///< [B, T] long, 1 for real tokens
};

/// Contextual subword encoder. Frozen encoders ignore train() and run
/// without autograd, so their outputs stay constant while heads train.
class TextEncoderImpl : public torch::nn::Module {
public:
    TextEncoderImpl(std::string identifier, const BertConfig& config, WordPieceTokenizer tokenizer,
                    std::int64_t max_len = 0);

    const std::string& identifier() const { return identifier_; }
    const BertConfig& config() const { return bert->config; }
    const WordPieceTokenizer& tokenizer() const { return tokenizer_; }
    std::int64_t hidden_size() const { return bert->config.hidden_size; }
    std::int64_t output_dim() const { return 4 * hidden_size(); }
    std::int64_t max_len() const { return max_len_; }

    /// [CLS] pieces [SEP], right-truncated to max_len and padded to the
    /// longest sequence. Throws DataError when a text yields no word pieces.
    TokenBatch tokenize(const std::vector<std::string>& texts) const;

    /// [B, 4H]
    torch::Tensor encode_pooled(const std::vector<std::string>& texts);
    /// [T, 4H] for the T word pieces of `text`.
    torch::Tensor encode_tokens(const std::string& text);

    void set_frozen(bool frozen);
    bool frozen() const { return frozen_; }
    void train(bool on = true) override;

    BertModel bert{nullptr};

private:
    std::vector<torch::Tensor> hidden_states(const TokenBatch& batch);

    std::string identifier_;
    WordPieceTokenizer tokenizer_;
    std::int64_t max_len_;
    bool frozen_ = false;
};
TORCH_MODULE(TextEncoder);

/// Residual trunk whose classification layer is replaced by a 512-unit
/// projection (ReLU) followed by dropout, active only in training mode.
class ImageEncoderImpl : public torch::nn::Module {
public:
    static constexpr std::int64_t kFeatureDim = 512;

    ImageEncoderImpl(std::string identifier, const ResNetConfig& config, double dropout = 0.5);

    const std::string& identifier() const { return identifier_; }
    const ResNetConfig& config() const { return resnet->config; }
    std::int64_t feature_dim() const { return kFeatureDim; }

    /// [B, 3, 224, 224] -> [B, 512]
    torch::Tensor forward(const torch::Tensor& images);
    torch::Tensor encode(const std::vector<const ImageTensor*>& images);

    void set_frozen(bool frozen);
    bool frozen() const { return frozen_; }
    void train(bool on = true) override;

    ResNetTrunk resnet{nullptr};
    torch::nn::Linear embed{nullptr};
    torch::nn::Dropout dropout{nullptr};

private:
    std::string identifier_;
    bool frozen_ = false;
};
TORCH_MODULE(ImageEncoder);

/// Single-item conveniences over the encoder modules.
torch::Tensor encode_text(TextEncoder& encoder, const std::string& text, PoolMode mode);
torch::Tensor encode_image(ImageEncoder& encoder, const ImageTensor& image);

/// Stacks images into a [B, 3, 224, 224] tensor of the given dtype.
torch::Tensor image_batch(const std::vector<const ImageTensor*>& images, torch::ScalarType dtype = torch::kFloat32);

struct LoadReport {
    std::vector<std::string> loaded;
    std::vector<std::string> missing;     ///< module tensors absent from the checkpoint
    std::vector<std::string> mismatched;  ///< present but with a different shape
};

/// Copies checkpoint tensors into the module's parameters and buffers by
/// name. Each module name is looked up as-is and with each of `prefixes`
/// prepended.
LoadReport load_matching(torch::nn::Module& module, const safetensors::TensorMap& weights,
                         const std::vector<std::string>& prefixes = {});

/// Where encoders come from. Identifiers are either a local directory, a
/// name resolved under $NEWSFRAME_MODEL_DIR, or a built-in randomly
/// initialised variant:
///   text:  builtin:bert-tiny, builtin:bert-mini, builtin:bert-base
///   image: builtin:resnet-tiny, builtin:resnet18, builtin:resnet50
/// Built-in text encoders build their vocabulary from `vocab_texts`.
/// Text directories hold config.json, vocab.txt and model.safetensors;
/// image directories hold model.safetensors and optionally config.json.
struct EncoderSpec {
    std::string text_id = "builtin:bert-tiny";
    std::string image_id = "builtin:resnet-tiny";
    std::int64_t max_len = 0;  ///< 0: the encoder's position limit
    std::uint64_t init_seed = 0;
};

void to_json(nlohmann::json& j, const EncoderSpec& s);
void from_json(const nlohmann::json& j, EncoderSpec& s);

class EncoderSource {
public:
    EncoderSource(EncoderSpec spec, std::vector<std::string> vocab_texts);

    const EncoderSpec& spec() const { return spec_; }

    /// Fresh, independently trainable instances. Construction is
    /// deterministic; it reseeds torch's generator with init_seed.
    TextEncoder make_text() const;
    ImageEncoder make_image() const;

private:
    EncoderSpec spec_;
    std::vector<std::string> vocab_texts_;
    mutable std::mutex mu_;
    mutable std::shared_ptr<safetensors::TensorMap> text_weights_, image_weights_;
    mutable std::shared_ptr<WordPieceTokenizer> tokenizer_;
};

/// Resolves a non-builtin identifier to a directory; throws DataError if
/// nothing exists locally.
std::filesystem::path resolve_model_dir(const std::string& identifier);

/// Writes config.json, vocab.txt and model.safetensors.
void save_text_encoder(TextEncoder& encoder, const std::filesystem::path& dir);
void save_image_encoder(ImageEncoder& encoder, const std::filesystem::path& dir);

}  // namespace newsframe
